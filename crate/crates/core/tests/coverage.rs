mod common;

use std::f64::consts::PI;

use ulcov_core::coverage::*;
use ulcov_core::distributions::ThreeGpp;
use ulcov_core::interference::Tolerances;
use ulcov_core::montecarlo::empirical_ase;
use ulcov_core::pathloss::{LinkType, LosProfile};
use ulcov_core::quadrature::integrate_adaptive;
use ulcov_core::scenario::Fading;
use ulcov_core::NetworkScenario;

fn db(x: f64) -> f64 {
    10f64.powf(x / 10.0)
}

fn integral<F: FnMut(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    integrate_adaptive(f, a, b, tol).unwrap().value
}

fn engine(sc: &NetworkScenario) -> CoverageEngine {
    CoverageEngine::with_tolerances(sc, Tolerances::coarse()).unwrap()
}

#[test]
fn coverage_is_a_ccdf_on_the_threshold_grid() {
    for lambda in [10.0, 1e3] {
        let e = engine(&NetworkScenario::three_gpp(lambda, 0.7));
        let vals: Vec<f64> = (-10..=20)
            .map(|k| e.coverage_probability(db(k as f64)).unwrap())
            .collect();
        assert!(vals.iter().all(|v| (0.0..=1.0).contains(v)));
        for w in vals.windows(2) {
            assert!(w[1] <= w[0] + 1e-9, "λ={lambda}: {vals:?}");
        }
        assert!(vals[0] > 0.3);
        assert!(vals[30] < 1e-3);
    }
}

#[test]
fn conditional_coverage_limits() {
    let mut sc = NetworkScenario::three_gpp(1e-10, 0.7);
    sc.noise = 0.0;
    let c = ThreeGppCoverage::new(&sc).unwrap();
    for (link, r) in [
        (LinkType::Los, 0.1),
        (LinkType::Nlos, 0.2),
        (LinkType::Nlos, 2.0),
    ] {
        let v = c.conditional_coverage(link, r, 1.0).unwrap();
        assert!(v > 1.0 - 1e-4, "{link:?} r={r}: {v}");
    }
    let c = ThreeGppCoverage::new(&NetworkScenario::three_gpp(100.0, 0.7)).unwrap();
    for t in [1e6, 1e9] {
        let v = c.conditional_coverage(LinkType::Los, 0.05, t).unwrap();
        assert!(v < 1e-6, "T={t}: {v}");
    }
    assert!(c.conditional_coverage(LinkType::Los, 0.5, 1.0).is_err());
    assert!(c.conditional_coverage(LinkType::Nlos, 0.0, 1.0).is_err());
    assert!(c.conditional_coverage(LinkType::Nlos, 0.1, -1.0).is_err());
}

#[test]
fn conditional_coverage_matches_model_simulation() {
    let sc = NetworkScenario::three_gpp(100.0, 0.7);
    let c = ThreeGppCoverage::new(&sc).unwrap();
    for (link, r, t) in [(LinkType::Los, 0.05, 1.0), (LinkType::Nlos, 0.1, 0.3)] {
        let zeta = sc.model.attenuation(r, link);
        let s = t * zeta.powf(1.0 - sc.power.epsilon) / sc.power.p0;
        let (l, se) = common::model_laplace(&sc, s, zeta, 2.0, 3000, 11);
        let want = (-s * sc.noise).exp() * l;
        let got = c.conditional_coverage(link, r, t).unwrap();
        let se = (-s * sc.noise).exp() * se;
        assert!(
            (got - want).abs() <= 3.0 * se,
            "{link:?} r={r}: {got} vs {want} ± {se}"
        );
    }
}

#[test]
fn interference_free_limit_is_the_noise_limited_value() {
    let sc = NetworkScenario::three_gpp(1e-8, 0.7);
    let c = ThreeGppCoverage::new(&sc).unwrap();
    let g = ThreeGpp::new(&sc.model, &sc.profile, sc.lambda).unwrap();
    let t = 0.1;
    let noise_only = |link: LinkType, r: f64| {
        let z = g.law(link).eval(r);
        (-t * z.powf(1.0 - sc.power.epsilon) / sc.power.p0 * sc.noise).exp()
    };
    let want_l = integral(
        |r| noise_only(LinkType::Los, r) * g.los1(r),
        0.0,
        g.d1(),
        1e-10,
    );
    let want_nl = integral(
        |r| noise_only(LinkType::Nlos, r) * g.nlos1(r),
        0.0,
        g.d1(),
        1e-10,
    );
    let got_l = c.t1l(t).unwrap();
    let got_nl = c.t1nl(t).unwrap();
    assert!(
        ((got_l - want_l) / want_l).abs() < 1e-3,
        "{got_l} vs {want_l}"
    );
    assert!(
        ((got_nl - want_nl) / want_nl).abs() < 1e-3,
        "{got_nl} vs {want_nl}"
    );
}

#[test]
fn near_terms_bounded_by_their_masses() {
    for lambda in [1.0, 10.0, 100.0, 1000.0] {
        let sc = NetworkScenario::three_gpp(lambda, 0.7);
        let c = ThreeGppCoverage::with_tolerances(&sc, Tolerances::coarse()).unwrap();
        let g = ThreeGpp::new(&sc.model, &sc.profile, lambda).unwrap();
        let mass_l = integral(|r| g.los1(r), 0.0, g.d1(), 1e-10);
        let mass_nl = integral(|r| g.nlos1(r), 0.0, g.d1(), 1e-10);
        for t in [0.1, 1.0] {
            let l = c.t1l(t).unwrap();
            let nl = c.t1nl(t).unwrap();
            assert!(l >= 0.0 && l <= mass_l + 1e-9, "λ={lambda}: {l} > {mass_l}");
            assert!(
                nl >= 0.0 && nl <= mass_nl + 1e-9,
                "λ={lambda}: {nl} > {mass_nl}"
            );
        }
    }
}

#[test]
fn far_los_term_is_zero() {
    for lambda in [1.0, 100.0, 1e4] {
        for eps in [0.5, 1.0] {
            let c = ThreeGppCoverage::new(&NetworkScenario::three_gpp(lambda, eps)).unwrap();
            for t in [0.0, 0.1, 10.0] {
                assert_eq!(c.t2l(t).unwrap(), 0.0);
            }
            assert_eq!(c.terms(1.0).unwrap().t2l, 0.0);
        }
    }
}

// Once d1 is negligible against typical distances the network is NLoS-only
// and its SIR law no longer depends on λ, so interference does not vanish.
#[test]
fn far_nlos_term_tends_to_single_slope_sir_coverage() {
    let t = 1.0;
    let mut ss = NetworkScenario::single_slope(1.0, 0.7);
    ss.noise = 0.0;
    let want = GenericCoverage::new(&ss)
        .unwrap()
        .coverage_probability(t)
        .unwrap();
    for lambda in [1e-8, 1e-6] {
        let mut sc = NetworkScenario::three_gpp(lambda, 0.7);
        sc.noise = 0.0;
        let c = ThreeGppCoverage::new(&sc).unwrap();
        let mass = (-PI * lambda * 0.09).exp();
        let v = c.t2nl(t, T2nlMethod::Direct).unwrap();
        assert!((v - want).abs() < 1e-3, "λ={lambda}: {v} vs {want}");
        assert!(v < 0.6 * mass);
    }
}

#[test]
fn laguerre_far_nlos_term_converges_to_direct() {
    for (lambda, eps) in [
        (1.0, 0.7),
        (10.0, 0.7),
        (10.0, 0.8),
        (20.0, 0.6),
        (100.0, 0.7),
    ] {
        let c = ThreeGppCoverage::new(&NetworkScenario::three_gpp(lambda, eps)).unwrap();
        for t in [db(-10.0), 1.0, db(10.0)] {
            let direct = c.t2nl(t, T2nlMethod::Direct).unwrap();
            let errs: Vec<f64> = [10, 20, 30]
                .iter()
                .map(|&n| (c.t2nl(t, T2nlMethod::GaussLaguerre(n)).unwrap() - direct).abs())
                .collect();
            assert!(errs[2] <= 1e-3, "λ={lambda} T={t}: {errs:?}");
            assert!(
                errs[1] <= errs[0] + 1e-9 && errs[2] <= errs[1] + 1e-9,
                "λ={lambda} T={t}: {errs:?}"
            );
        }
    }
    assert!(
        ThreeGppCoverage::new(&NetworkScenario::three_gpp(10.0, 0.7))
            .unwrap()
            .t2nl(1.0, T2nlMethod::GaussLaguerre(0))
            .is_err()
    );
}

#[test]
fn laguerre_method_selects_the_total() {
    let sc = NetworkScenario::three_gpp(1.0, 0.7);
    let direct = ThreeGppCoverage::new(&sc).unwrap();
    let gl = ThreeGppCoverage::new(&sc)
        .unwrap()
        .with_t2nl_method(T2nlMethod::GaussLaguerre(DEFAULT_LAGUERRE_ORDER))
        .unwrap();
    let a = direct.coverage_probability(0.1).unwrap();
    let b = gl.coverage_probability(0.1).unwrap();
    assert!((a - b).abs() < 1e-3 && a != b);
}

#[test]
fn integration_orders_agree() {
    let sc = NetworkScenario::three_gpp(100.0, 0.7);
    let swapped = ThreeGppCoverage::new(&sc).unwrap();
    let nested = ThreeGppCoverage::new(&sc)
        .unwrap()
        .with_laplace_form(LaplaceForm::Nested);
    let a = swapped.coverage_probability(1.0).unwrap();
    let b = nested.coverage_probability(1.0).unwrap();
    assert!((a - b).abs() < 1e-6, "{a} vs {b}");
}

#[test]
fn generic_evaluator_matches_closed_form() {
    for (lambda, t) in [(10.0, 0.5), (300.0, 2.0)] {
        let sc = NetworkScenario::three_gpp(lambda, 0.7);
        let closed = ThreeGppCoverage::new(&sc)
            .unwrap()
            .coverage_probability(t)
            .unwrap();
        let generic = GenericCoverage::new(&sc)
            .unwrap()
            .coverage_probability(t)
            .unwrap();
        assert!(
            (closed - generic).abs() < 1e-6,
            "λ={lambda}: {closed} vs {generic}"
        );
    }
    let sc = NetworkScenario::three_gpp(30.0, 0.7);
    let closed = ThreeGppCoverage::new(&sc)
        .unwrap()
        .coverage_probability(1.0)
        .unwrap();
    let nested = GenericCoverage::with_form(&sc, Tolerances::default(), LaplaceForm::Nested)
        .unwrap()
        .coverage_probability(1.0)
        .unwrap();
    assert!((closed - nested).abs() < 1e-6, "{closed} vs {nested}");
}

#[test]
fn exponential_profile_uses_the_generic_evaluator() {
    let mut sc = NetworkScenario::three_gpp(50.0, 0.7);
    sc.profile = LosProfile::exponential_default();
    let e = engine(&sc);
    assert!(matches!(e, CoverageEngine::Generic(_)));
    let lo = e.coverage_probability(0.1).unwrap();
    let hi = e.coverage_probability(10.0).unwrap();
    assert!(lo > hi && hi >= 0.0 && lo <= 1.0, "{lo} {hi}");
}

#[test]
fn ricean_fading_is_rejected() {
    let mut sc = NetworkScenario::three_gpp(10.0, 0.7);
    sc.fading = Fading::Ricean { k: db(15.0) };
    assert!(matches!(
        CoverageEngine::new(&sc),
        Err(ulcov_core::Error::Config(_))
    ));
    assert!(coverage_probability(&sc, 1.0).is_err());
    assert!(ase(&sc, 1.0).is_err());
}

#[test]
fn sinr_density_is_a_density() {
    let e = engine(&NetworkScenario::three_gpp(100.0, 0.7));
    // Trapezoid in log x on [1e-5, 1e4].
    let n = 90;
    let (a, b) = (1e-5f64.ln(), 1e4f64.ln());
    let h = (b - a) / n as f64;
    let mut total = 0.0;
    for i in 0..=n {
        let x = (a + i as f64 * h).exp();
        let p = e.sinr_pdf(x).unwrap();
        assert!(p >= -1e-6, "x={x}: {p}");
        let w = if i == 0 || i == n { 0.5 } else { 1.0 };
        total += w * h * p * x;
    }
    assert!((total - 1.0).abs() < 1e-2, "∫ = {total}");
    assert!(e.sinr_pdf(0.0).is_err());
}

#[test]
fn ase_of_a_vanishing_ccdf_is_zero() {
    let v = ase_from_ccdf(100.0, 1.0, |t| Ok(if t > 1.0 { 0.0 } else { 1.0 })).unwrap();
    assert!(v.abs() < 1e-12 || (v - 100.0).abs() < 1e-9);
    let zero = ase_from_ccdf(100.0, 1.0, |_| Ok(0.0)).unwrap();
    assert_eq!(zero, 0.0);
    assert!(ase_from_ccdf(1.0, 0.0, |_| Ok(0.5)).is_err());
}

#[test]
fn ase_of_a_known_ccdf() {
    // P(x) = 1/(1+x): ∫_1^∞ dx/((1+x)² ln2) = 1/(2 ln2), head 1/2.
    let v = ase_from_ccdf(3.0, 1.0, |x| Ok(1.0 / (1.0 + x))).unwrap();
    let want = 3.0 * (0.5 + 0.5 / std::f64::consts::LN_2);
    assert!(((v - want) / want).abs() < 1e-4, "{v} vs {want}");
}

#[test]
fn ase_by_parts_matches_density_form() {
    let lambda = 10.0;
    let e = engine(&NetworkScenario::three_gpp(lambda, 0.7));
    let by_parts = e.ase(lambda, 1.0).unwrap();
    let f = |v: f64| {
        let x = v.exp();
        (1.0 + x).log2() * e.sinr_pdf(x).unwrap() * x
    };
    let direct = lambda * integral(f, 0.0, 1e3f64.ln(), 1e-5);
    assert!(
        ((by_parts - direct) / by_parts).abs() < 1e-3,
        "{by_parts} vs {direct}"
    );
}

#[test]
fn ase_matches_model_simulation() {
    let lambda = 100.0;
    let sc = NetworkScenario::three_gpp(lambda, 0.7);
    let analytic = engine(&sc).ase(lambda, 1.0).unwrap();
    let samples = common::model_sinr(&sc, 1.0, 20_000, 5);
    let mc = empirical_ase(&samples, lambda, 1.0).unwrap();
    let terms: Vec<f64> = samples
        .iter()
        .map(|&s| {
            if s > 1.0 {
                lambda * (1.0 + s).log2()
            } else {
                0.0
            }
        })
        .collect();
    let (_, se) = common::mean_se(&terms);
    assert!(
        ((analytic - mc) / analytic).abs() < 0.05,
        "{analytic} vs {mc}"
    );
    assert!(
        (analytic - mc).abs() < 3.0 * se + 0.002 * analytic,
        "{analytic} vs {mc} ± {se}"
    );
}
