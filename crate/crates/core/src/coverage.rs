//! Coverage probability, SINR density and area spectral efficiency.
//!
//! The coverage probability `P(T) = Pr[SINR > T]` splits by serving link
//! type and distance band: `T1L` (LoS, `r ≤ d1`), `T1NL` (NLoS, `r ≤ d1`),
//! `T2L` (LoS beyond `d1`, identically zero for the linear profile) and
//! `T2NL` (NLoS beyond `d1`). Each term integrates the conditional coverage
//! `exp(−s·σ²)·L(s)`, `s = T·ζ(r)^{1−ε}/p0`, against the serving density.

use alloc::vec::Vec;

use crate::distributions::{ServingDistance, ThreeGpp};
use crate::interference::{
    GenericLaplace, ServingCase, SwappedLaplace, ThreeGppLaplace, Tolerances,
};
#[allow(unused_imports)]
use crate::math::*;
use crate::pathloss::{LinkType, LosProfile, PowerControl};
use crate::quadrature::{
    best, gauss_laguerre, integrate_adaptive, integrate_pieces, integrate_semi_infinite,
    split_points, GaussLaguerreRule,
};
use crate::scenario::{Fading, NetworkScenario};
use crate::{Error, Result};

/// Default Gauss-Laguerre order for `T2NL`.
pub const DEFAULT_LAGUERRE_ORDER: usize = 30;

/// Contributions below this bound skip the interference transform.
const NEGLIGIBLE: f64 = 1e-30;

/// How `T2NL` integrates over serving distances beyond `d1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum T2nlMethod {
    /// Adaptive quadrature on `(d1, ∞)`.
    Direct,
    /// `e^{−πλd1²}·Σ ωᵢ h(r(uᵢ))` with `πλr² − πλd1² = u`.
    GaussLaguerre(usize),
}

/// Integration order inside the interference transform.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LaplaceForm {
    /// Interferer distance outside, interferer serving distance inside.
    Nested,
    /// Exchanged order with the distance integral in closed form; needs a
    /// single-band model and the linear or single-slope profile.
    Swapped,
}

/// The four terms of the coverage probability.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CoverageTerms {
    pub t1l: f64,
    pub t1nl: f64,
    pub t2l: f64,
    pub t2nl: f64,
}

impl CoverageTerms {
    pub fn total(&self) -> f64 {
        self.t1l + self.t1nl + self.t2l + self.t2nl
    }
}

fn check_threshold(t: f64) -> Result<()> {
    if t >= 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::domain("threshold", t, "finite and ≥ 0"))
    }
}

fn reject_ricean(s: &NetworkScenario) -> Result<()> {
    if let Fading::Ricean { .. } = s.fading {
        return Err(Error::config(
            "analytic coverage assumes Rayleigh fading; use the Monte Carlo simulator for Ricean links",
        ));
    }
    Ok(())
}

/// Closed-form evaluator for the linear LoS profile on a single-band model.
#[derive(Debug, Clone)]
pub struct ThreeGppCoverage {
    lap: ThreeGppLaplace,
    swapped: SwappedLaplace,
    form: LaplaceForm,
    pc: PowerControl,
    noise: f64,
    tol: Tolerances,
    method: T2nlMethod,
    rule: Option<GaussLaguerreRule>,
}

impl ThreeGppCoverage {
    pub fn new(scenario: &NetworkScenario) -> Result<Self> {
        Self::with_tolerances(scenario, Tolerances::default())
    }

    pub fn with_tolerances(scenario: &NetworkScenario, tol: Tolerances) -> Result<Self> {
        scenario.validate()?;
        reject_ricean(scenario)?;
        let geo = ThreeGpp::new(&scenario.model, &scenario.profile, scenario.lambda)?;
        let sd = ServingDistance::new(&scenario.model, scenario.profile, scenario.lambda);
        Ok(ThreeGppCoverage {
            lap: ThreeGppLaplace::new(geo, scenario.power, tol),
            swapped: SwappedLaplace::new(sd, scenario.power, tol)?,
            form: LaplaceForm::Swapped,
            pc: scenario.power,
            noise: scenario.noise,
            tol,
            method: T2nlMethod::Direct,
            rule: None,
        })
    }

    /// Selects the `T2NL` method used by [`Self::coverage_probability`].
    pub fn with_t2nl_method(mut self, method: T2nlMethod) -> Result<Self> {
        self.rule = match method {
            T2nlMethod::Direct => None,
            T2nlMethod::GaussLaguerre(n) => Some(gauss_laguerre(n)?),
        };
        self.method = method;
        Ok(self)
    }

    /// Selects the integration order of the interference transform
    /// (default [`LaplaceForm::Swapped`]).
    pub fn with_laplace_form(mut self, form: LaplaceForm) -> Self {
        self.form = form;
        self
    }

    pub fn laplace(&self) -> &ThreeGppLaplace {
        &self.lap
    }

    fn geo(&self) -> &ThreeGpp {
        self.lap.geometry()
    }

    fn case(&self, link: LinkType, r: f64) -> Result<ServingCase> {
        let d1 = self.geo().d1();
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::domain("r", r, "finite and > 0"));
        }
        match link {
            LinkType::Los if r <= d1 => Ok(ServingCase::L1),
            LinkType::Los => Err(Error::domain("r", r, "no LoS serving link beyond d1")),
            LinkType::Nlos if r <= d1 => Ok(ServingCase::NL1),
            LinkType::Nlos => Ok(ServingCase::NL2),
        }
    }

    /// `Pr[SINR > T | serving link type and distance r]`.
    pub fn conditional_coverage(&self, link: LinkType, r: f64, t: f64) -> Result<f64> {
        check_threshold(t)?;
        let case = self.case(link, r)?;
        Ok(self.cond(case, link, r, t, 1.0))
    }

    /// `weight · Pr[SINR > T | r]`, skipping the transform when the product
    /// is negligible anyway.
    #[inline]
    fn cond(&self, case: ServingCase, link: LinkType, r: f64, t: f64, weight: f64) -> f64 {
        let zeta = self.geo().law(link).eval(r);
        let s = t * zeta.powf(1.0 - self.pc.epsilon) / self.pc.p0;
        let w = weight * (-s * self.noise).exp();
        if w < NEGLIGIBLE {
            return 0.0;
        }
        match self.form {
            LaplaceForm::Swapped => w * self.swapped.laplace(s, zeta),
            LaplaceForm::Nested => w * self.lap.by_case(case, s, r),
        }
    }

    pub fn t1l(&self, t: f64) -> Result<f64> {
        check_threshold(t)?;
        let g = *self.geo();
        let f = |r: f64| {
            let d = g.los1(r);
            if d <= 0.0 {
                0.0
            } else {
                self.cond(ServingCase::L1, LinkType::Los, r, t, d)
            }
        };
        Ok(best(integrate_adaptive(f, 0.0, g.d1(), self.tol.outer)))
    }

    pub fn t1nl(&self, t: f64) -> Result<f64> {
        check_threshold(t)?;
        let g = *self.geo();
        let f = |r: f64| {
            let d = g.nlos1(r);
            if d <= 0.0 {
                0.0
            } else {
                self.cond(ServingCase::NL1, LinkType::Nlos, r, t, d)
            }
        };
        Ok(integrate_pieces(f, &[0.0, g.y1(), g.d1()], self.tol.outer))
    }

    /// LoS association beyond `d1` is impossible under the linear profile.
    pub fn t2l(&self, t: f64) -> Result<f64> {
        check_threshold(t)?;
        Ok(0.0)
    }

    pub fn t2nl(&self, t: f64, method: T2nlMethod) -> Result<f64> {
        check_threshold(t)?;
        match method {
            T2nlMethod::Direct => Ok(self.t2nl_direct(t)),
            T2nlMethod::GaussLaguerre(n) => {
                let rule = match (&self.rule, self.method) {
                    (Some(rule), T2nlMethod::GaussLaguerre(m)) if m == n => rule.clone(),
                    _ => gauss_laguerre(n)?,
                };
                Ok(self.t2nl_laguerre(t, &rule))
            }
        }
    }

    fn t2nl_direct(&self, t: f64) -> f64 {
        let g = *self.geo();
        let f = |r: f64| {
            let d = g.nlos2(r);
            if d <= 0.0 {
                0.0
            } else {
                self.cond(ServingCase::NL2, LinkType::Nlos, r, t, d)
            }
        };
        best(integrate_semi_infinite(f, g.d1(), self.tol.outer))
    }

    fn t2nl_laguerre(&self, t: f64, rule: &GaussLaguerreRule) -> f64 {
        let g = *self.geo();
        let pl = PI * g.lambda();
        let shift = pl * g.d1() * g.d1();
        let sum = rule.apply(|u| {
            let r = ((u + shift) / pl).sqrt();
            self.cond(ServingCase::NL2, LinkType::Nlos, r, t, 1.0)
        });
        (-shift).exp() * sum
    }

    pub fn terms(&self, t: f64) -> Result<CoverageTerms> {
        Ok(CoverageTerms {
            t1l: self.t1l(t)?,
            t1nl: self.t1nl(t)?,
            t2l: self.t2l(t)?,
            t2nl: self.t2nl(t, self.method)?,
        })
    }

    pub fn coverage_probability(&self, t: f64) -> Result<f64> {
        Ok(self.terms(t)?.total().clamp(0.0, 1.0))
    }
}

/// Evaluator for arbitrary LoS profiles and piecewise path loss models.
#[derive(Debug, Clone)]
pub struct GenericCoverage {
    sd: ServingDistance,
    kernel: Kernel,
    pc: PowerControl,
    noise: f64,
    tol: Tolerances,
}

#[derive(Debug, Clone)]
enum Kernel {
    Nested(GenericLaplace),
    Swapped(SwappedLaplace),
}

impl GenericCoverage {
    pub fn new(scenario: &NetworkScenario) -> Result<Self> {
        Self::with_tolerances(scenario, Tolerances::default())
    }

    /// Uses the swapped-order transform whenever it applies.
    pub fn with_tolerances(scenario: &NetworkScenario, tol: Tolerances) -> Result<Self> {
        let form = if SwappedLaplace::applies(&scenario.model, &scenario.profile) {
            LaplaceForm::Swapped
        } else {
            LaplaceForm::Nested
        };
        Self::with_form(scenario, tol, form)
    }

    pub fn with_form(
        scenario: &NetworkScenario,
        tol: Tolerances,
        form: LaplaceForm,
    ) -> Result<Self> {
        scenario.validate()?;
        reject_ricean(scenario)?;
        let sd = ServingDistance::new(&scenario.model, scenario.profile, scenario.lambda);
        match form {
            LaplaceForm::Nested => Ok(Self::from_serving(sd, scenario.power, scenario.noise, tol)),
            LaplaceForm::Swapped => Ok(GenericCoverage {
                kernel: Kernel::Swapped(SwappedLaplace::new(sd.clone(), scenario.power, tol)?),
                sd,
                pc: scenario.power,
                noise: scenario.noise,
                tol,
            }),
        }
    }

    /// Nested-order evaluator on a prepared serving distribution.
    pub fn from_serving(
        sd: ServingDistance,
        pc: PowerControl,
        noise: f64,
        tol: Tolerances,
    ) -> Self {
        GenericCoverage {
            kernel: Kernel::Nested(GenericLaplace::new(sd.clone(), pc, tol)),
            sd,
            pc,
            noise,
            tol,
        }
    }

    pub fn serving(&self) -> &ServingDistance {
        &self.sd
    }

    /// `L(s)` for a serving link with path loss `serving_zeta`.
    pub fn laplace(&self, s: f64, serving_zeta: f64) -> f64 {
        match &self.kernel {
            Kernel::Nested(l) => l.laplace(s, serving_zeta),
            Kernel::Swapped(l) => l.laplace(s, serving_zeta),
        }
    }

    pub fn conditional_coverage(&self, link: LinkType, r: f64, t: f64) -> Result<f64> {
        check_threshold(t)?;
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::domain("r", r, "finite and > 0"));
        }
        if link == LinkType::Los && r > self.sd.profile().los_support_end() {
            return Err(Error::domain(
                "r",
                r,
                "no LoS serving link at this distance",
            ));
        }
        Ok(self.cond(link, r, t, 1.0))
    }

    fn cond(&self, link: LinkType, r: f64, t: f64, weight: f64) -> f64 {
        let zeta = self.sd.model().attenuation(r, link);
        let s = t * zeta.powf(1.0 - self.pc.epsilon) / self.pc.p0;
        let w = weight * (-s * self.noise).exp();
        if w < NEGLIGIBLE {
            return 0.0;
        }
        w * self.laplace(s, zeta)
    }

    /// Coverage contributed by one link type on the band `(lo, hi]`.
    pub fn band(&self, link: LinkType, lo: f64, hi: f64, t: f64) -> Result<f64> {
        check_threshold(t)?;
        let sd = &self.sd;
        let hi = hi.min(sd.cutoff(link));
        if hi <= lo {
            return Ok(0.0);
        }
        let f = |r: f64| {
            let d = sd.density(r, link);
            if d <= 0.0 {
                0.0
            } else {
                self.cond(link, r, t, d)
            }
        };
        let pts = split_points(lo, hi, &sd.kinks());
        Ok(integrate_pieces(f, &pts, self.tol.outer))
    }

    /// Coverage per `(link, band)`, bands as in [`ServingDistance::segments`].
    pub fn terms(&self, t: f64) -> Result<Vec<(LinkType, usize, f64)>> {
        let seg = self.sd.segments();
        let mut out = Vec::new();
        for (i, w) in seg.windows(2).enumerate() {
            for link in LinkType::BOTH {
                out.push((link, i + 1, self.band(link, w[0], w[1], t)?));
            }
        }
        Ok(out)
    }

    pub fn coverage_probability(&self, t: f64) -> Result<f64> {
        let total: f64 = self.terms(t)?.iter().map(|&(_, _, v)| v).sum();
        Ok(total.clamp(0.0, 1.0))
    }
}

/// Picks the closed-form evaluator when it applies and the generic one
/// otherwise.
#[derive(Debug, Clone)]
pub enum CoverageEngine {
    ThreeGpp(ThreeGppCoverage),
    Generic(GenericCoverage),
}

impl CoverageEngine {
    pub fn new(scenario: &NetworkScenario) -> Result<Self> {
        Self::with_tolerances(scenario, Tolerances::default())
    }

    pub fn with_tolerances(scenario: &NetworkScenario, tol: Tolerances) -> Result<Self> {
        if matches!(scenario.profile, LosProfile::Linear { .. })
            && scenario.model.as_single().is_some()
        {
            Ok(CoverageEngine::ThreeGpp(ThreeGppCoverage::with_tolerances(
                scenario, tol,
            )?))
        } else {
            Ok(CoverageEngine::Generic(GenericCoverage::with_tolerances(
                scenario, tol,
            )?))
        }
    }

    pub fn coverage_probability(&self, t: f64) -> Result<f64> {
        match self {
            CoverageEngine::ThreeGpp(c) => c.coverage_probability(t),
            CoverageEngine::Generic(c) => c.coverage_probability(t),
        }
    }

    /// `−∂P/∂x` by a central difference with step `max(10⁻³, 10⁻³·x)`.
    pub fn sinr_pdf(&self, x: f64) -> Result<f64> {
        if !(x > 0.0 && x.is_finite()) {
            return Err(Error::domain("x", x, "finite and > 0"));
        }
        let h = (1e-3 * x).max(1e-3);
        let lo = (x - h).max(0.0);
        let hi = x + h;
        Ok((self.coverage_probability(lo)? - self.coverage_probability(hi)?) / (hi - lo))
    }

    /// Area spectral efficiency in bps/Hz/km².
    pub fn ase(&self, lambda: f64, t0: f64) -> Result<f64> {
        ase_from_ccdf(lambda, t0, |t| self.coverage_probability(t))
    }
}

/// Coverage below which the ASE integrand is truncated.
pub const ASE_CCDF_FLOOR: f64 = 1e-6;
/// Largest threshold included in the ASE integral.
pub const ASE_MAX_THRESHOLD: f64 = 1e6;
const ASE_TOL: f64 = 1e-5;

/// `λ·[log2(1+T0)·P(T0) + ∫_{T0}^∞ P(x)/((1+x) ln 2) dx]` for a given SINR
/// CCDF `P`. The upper limit stops at the first decade where
/// `P < 10⁻⁶`, or at `10⁶`.
pub fn ase_from_ccdf<F: FnMut(f64) -> Result<f64>>(
    lambda: f64,
    t0: f64,
    mut ccdf: F,
) -> Result<f64> {
    if !(t0 > 0.0 && t0.is_finite()) {
        return Err(Error::domain("T0", t0, "finite and > 0"));
    }
    let p0 = ccdf(t0)?;
    let head = (1.0 + t0).log2() * p0;
    if p0 < ASE_CCDF_FLOOR {
        return Ok(lambda * head);
    }
    let mut top = t0;
    while top < ASE_MAX_THRESHOLD {
        top = (top * 10.0).min(ASE_MAX_THRESHOLD);
        if ccdf(top)? < ASE_CCDF_FLOOR {
            break;
        }
    }
    let mut err = None;
    let f = |v: f64| {
        let x = v.exp();
        match ccdf(x) {
            Ok(p) => p * x / ((1.0 + x) * LN_2),
            Err(e) => {
                err.get_or_insert(e);
                0.0
            }
        }
    };
    let tail = best(integrate_adaptive(f, t0.ln(), top.ln(), ASE_TOL));
    if let Some(e) = err {
        return Err(e);
    }
    Ok(lambda * (head + tail))
}

/// Coverage probability of a scenario at linear threshold `t`.
pub fn coverage_probability(scenario: &NetworkScenario, t: f64) -> Result<f64> {
    CoverageEngine::new(scenario)?.coverage_probability(t)
}

/// Area spectral efficiency of a scenario with minimum working SINR `t0`.
pub fn ase(scenario: &NetworkScenario, t0: f64) -> Result<f64> {
    CoverageEngine::new(scenario)?.ase(scenario.lambda, t0)
}

/// SINR density of a scenario at `x`.
pub fn sinr_pdf(scenario: &NetworkScenario, x: f64) -> Result<f64> {
    CoverageEngine::new(scenario)?.sinr_pdf(x)
}
