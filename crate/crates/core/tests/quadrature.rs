use std::f64::consts::PI;

use ulcov_core::quadrature::*;

fn factorial(k: u32) -> f64 {
    (1..=k).map(f64::from).product()
}

#[test]
fn laguerre_two_point_nodes_and_weights() {
    let r = gauss_laguerre(2).unwrap();
    let s = 2f64.sqrt();
    assert!((r.nodes()[0] - (2.0 - s)).abs() < 1e-13);
    assert!((r.nodes()[1] - (2.0 + s)).abs() < 1e-13);
    assert!((r.weights()[0] - (2.0 + s) / 4.0).abs() < 1e-13);
    assert!((r.weights()[1] - (2.0 - s) / 4.0).abs() < 1e-13);
}

#[test]
fn laguerre_moments_are_factorials() {
    for n in [1, 2, 3, 5, 10, 20, 30, 64, 100, 128] {
        let r = gauss_laguerre(n).unwrap();
        assert_eq!(r.order(), n);
        for k in 0..=(6.min(2 * n as u32 - 1)) {
            let m = r.apply(|u| u.powi(k as i32));
            let want = factorial(k);
            assert!(
                ((m - want) / want).abs() < 1e-8,
                "n={n} k={k}: {m} vs {want}"
            );
        }
    }
}

#[test]
fn laguerre_rule_invariants() {
    for n in [1, 4, 16, 30, 50, 128] {
        let r = gauss_laguerre(n).unwrap();
        let sw: f64 = r.weights().iter().sum();
        let su: f64 = r.nodes().iter().zip(r.weights()).map(|(u, w)| u * w).sum();
        assert!((sw - 1.0).abs() < 1e-12, "n={n} Σw={sw}");
        assert!((su - 1.0).abs() < 1e-10, "n={n} Σwu={su}");
        assert!(r.nodes()[0] > 0.0);
        assert!(r.nodes().windows(2).all(|w| w[1] > w[0]));
        assert!(r.weights().iter().all(|&w| w > 0.0));
    }
}

#[test]
fn laguerre_exact_to_degree_2n_minus_1() {
    let r = gauss_laguerre(8).unwrap();
    // ∫ (1 + u^15) e^{-u} du = 1 + 15!
    let v = r.apply(|u| 1.0 + u.powi(15));
    let want = 1.0 + factorial(15);
    assert!(((v - want) / want).abs() < 1e-10);
}

#[test]
fn laguerre_order_out_of_range() {
    assert!(gauss_laguerre(0).is_err());
    assert!(gauss_laguerre(MAX_LAGUERRE_ORDER + 1).is_err());
}

#[test]
fn adaptive_simple_examples() {
    let one = integrate_adaptive(|_| 1.0, 0.0, 1.0, 1e-10).unwrap();
    assert!((one.value - 1.0).abs() < 1e-14);
    let sq = integrate_adaptive(|x| x * x, 0.0, 1.0, 1e-10).unwrap();
    assert!((sq.value - 1.0 / 3.0).abs() < 1e-14);
    let d1 = 0.3;
    let m = integrate_adaptive(|x| (1.0 - x / d1) * 2.0 * PI * x, 0.0, d1, 1e-10).unwrap();
    assert!((m.value - PI * d1 * d1 / 3.0).abs() < 1e-14);
    assert!((m.value - 0.094248).abs() < 1e-6);
}

struct Case {
    name: &'static str,
    f: fn(f64) -> f64,
    a: f64,
    b: f64,
    exact: f64,
}

fn battery() -> Vec<Case> {
    vec![
        Case {
            name: "exp",
            f: |x| x.exp(),
            a: 0.0,
            b: 1.0,
            exact: 1f64.exp() - 1.0,
        },
        Case {
            name: "sqrt",
            f: |x| x.sqrt(),
            a: 0.0,
            b: 1.0,
            exact: 2.0 / 3.0,
        },
        Case {
            name: "log",
            f: |x| -x.ln(),
            a: 0.0,
            b: 1.0,
            exact: 1.0,
        },
        Case {
            name: "runge",
            f: |x| 1.0 / (1.0 + 25.0 * x * x),
            a: -1.0,
            b: 1.0,
            exact: 0.4 * 5f64.atan(),
        },
        Case {
            name: "sin",
            f: |x| x.sin(),
            a: 0.0,
            b: PI,
            exact: 2.0,
        },
        Case {
            name: "oscillatory",
            f: |x| (20.0 * x).cos(),
            a: 0.0,
            b: 2.0 * PI,
            exact: 0.0,
        },
        Case {
            name: "peak",
            f: |x| 1.0 / ((x - 0.3).powi(2) + 1e-4),
            a: 0.0,
            b: 1.0,
            exact: 100.0 * ((70f64).atan() + (30f64).atan()),
        },
        Case {
            name: "kink",
            f: |x| (x - 1.0 / 3.0).abs(),
            a: 0.0,
            b: 1.0,
            exact: 5.0 / 18.0,
        },
        Case {
            name: "inv_quartic_root",
            f: |x| x.powf(-0.25),
            a: 0.0,
            b: 1.0,
            exact: 4.0 / 3.0,
        },
        Case {
            name: "gauss",
            f: |x| (-x * x).exp(),
            a: -10.0,
            b: 10.0,
            exact: PI.sqrt(),
        },
    ]
}

#[test]
fn adaptive_error_estimates_bound_true_error() {
    for c in battery() {
        for tol in [1e-6, 1e-8] {
            let opts = AdaptiveOptions {
                abs_tol: 1e-13,
                ..AdaptiveOptions::relative(tol)
            };
            let e = integrate_adaptive_with(c.f, c.a, c.b, opts).unwrap();
            let err = (e.value - c.exact).abs();
            assert!(
                err <= e.error.max(1e-15),
                "{}: true {err:e} > est {:e}",
                c.name,
                e.error
            );
            let scale = c.exact.abs().max(1.0);
            assert!(err <= 10.0 * tol * scale, "{} tol {tol}: {err:e}", c.name);
        }
    }
}

#[test]
fn adaptive_reversed_limits() {
    let f = |x: f64| x.exp();
    let a = integrate_adaptive(f, 0.0, 2.0, 1e-10).unwrap().value;
    let b = integrate_adaptive(f, 2.0, 0.0, 1e-10).unwrap().value;
    assert!((a + b).abs() < 1e-12);
}

#[test]
fn adaptive_reports_non_convergence() {
    let opts = AdaptiveOptions {
        rel_tol: 1e-14,
        abs_tol: 0.0,
        max_subdivisions: 3,
    };
    let r = integrate_adaptive_with(|x| x.sin() / x.sqrt(), 0.0, 100.0, opts);
    match r {
        Err(ulcov_core::Error::NonConvergence { estimate, .. }) => assert!(estimate.is_finite()),
        other => panic!("expected non-convergence, got {other:?}"),
    }
}

#[test]
fn semi_infinite_examples() {
    let e = integrate_semi_infinite(|x| (-x).exp(), 0.0, 1e-10).unwrap();
    assert!((e.value - 1.0).abs() < 1e-10);
    let p = integrate_semi_infinite(|x| 1.0 / (x * x), 1.0, 1e-10).unwrap();
    assert!((p.value - 1.0).abs() < 1e-10);
    for lambda in [1.0, 10.0, 1000.0] {
        let d1 = 0.3;
        let f = |x: f64| (-PI * lambda * x * x).exp() * 2.0 * PI * lambda * x;
        let v = integrate_semi_infinite(f, d1, 1e-10).unwrap().value;
        let want = (-PI * lambda * d1 * d1).exp();
        assert!(
            (v - want).abs() <= 1e-9 * want.max(1e-300) + 1e-300,
            "λ={lambda}: {v} vs {want}"
        );
    }
}

// Both changes of variable behind the Laguerre form of the far-band term:
// r ↦ πλr² and then a shift by πλd1², leaving e^{−πλd1²}·∫₀^∞ e^{−v} h dv.
#[test]
fn change_of_variable_identity() {
    for lambda in [1.0, 10.0, 100.0] {
        let d1 = 0.3;
        let pl = PI * lambda;
        let h = |r: f64| 1.0 / (1.0 + r * r);
        let direct =
            integrate_semi_infinite(|r| h(r) * (-pl * r * r).exp() * 2.0 * pl * r, d1, 1e-13)
                .unwrap()
                .value;
        let shift = pl * d1 * d1;
        let transformed = (-shift).exp()
            * integrate_semi_infinite(|v| (-v).exp() * h(((v + shift) / pl).sqrt()), 0.0, 1e-13)
                .unwrap()
                .value;
        assert!(
            ((direct - transformed) / direct).abs() < 1e-10,
            "λ={lambda}: {direct} vs {transformed}"
        );
        // And Laguerre with enough nodes converges to the same value.
        let gl = (-shift).exp()
            * gauss_laguerre(64)
                .unwrap()
                .apply(|v| h(((v + shift) / pl).sqrt()));
        assert!(((gl - direct) / direct).abs() < 1e-6);
    }
}
