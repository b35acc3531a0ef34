//! Laplace transform of the aggregate uplink interference at the typical
//! BS, `L(s) = E[exp(−s·I)]`.
//!
//! Interfering BSs form a Poisson process outside the exclusion region set
//! by the serving link (their path loss to the typical BS must not be below
//! the serving path loss). Each one hosts an active UE whose transmit power
//! `p0·ζ(R_z)^ε` depends on its own serving distance `R_z`, and the UE is
//! placed at its BS for the purpose of the interference distance.

use alloc::vec;
use alloc::vec::Vec;

use crate::distributions::{InterfererDistanceCase, ServingDistance, ThreeGpp};
#[allow(unused_imports)]
use crate::math::*;
use crate::pathloss::{LinkType, LosProfile, PathLossModel, PowerControl, PowerLaw};
use crate::quadrature::{
    best, integrate_adaptive, integrate_pieces, integrate_semi_infinite, kronrod15, split_points,
};
use crate::{Error, Result};

/// Relative tolerances of the nested integrals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Serving distance `r`.
    pub outer: f64,
    /// Interferer distance `x`.
    pub middle: f64,
    /// Interferer serving distance `u`.
    pub inner: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            outer: 1e-6,
            middle: 1e-6,
            inner: 1e-7,
        }
    }
}

impl Tolerances {
    /// Looser settings for sweeps and ASE integrals; about twice as fast.
    pub fn coarse() -> Self {
        Tolerances {
            outer: 1e-4,
            middle: 1e-5,
            inner: 1e-5,
        }
    }
}

/// Serving configuration of the typical UE for the closed-form transforms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ServingCase {
    /// LoS link, `r ≤ d1`.
    L1,
    /// NLoS link, `r ≤ d1`.
    NL1,
    /// NLoS link, `r > d1`.
    NL2,
}

/// `ζ^ε` for a power law, kept as `A^ε·r^{αε}`.
#[derive(Debug, Clone, Copy)]
struct Powered {
    scale: f64,
    exponent: f64,
}

impl Powered {
    fn new(law: &PowerLaw, eps: f64) -> Self {
        Powered {
            scale: law.intercept.powf(eps),
            exponent: law.exponent * eps,
        }
    }

    #[inline]
    fn at(&self, u: f64) -> f64 {
        self.scale * u.powf(self.exponent)
    }
}

/// `a/(1+a)`: probability-like contribution of one interferer.
#[inline]
fn saturate(a: f64) -> f64 {
    a / (1.0 + a)
}

/// Closed-form Laplace transforms for the linear LoS profile.
#[derive(Debug, Clone, Copy)]
pub struct ThreeGppLaplace {
    geo: ThreeGpp,
    p0: f64,
    tx_los: Powered,
    tx_nlos: Powered,
    tol: Tolerances,
}

impl ThreeGppLaplace {
    pub fn new(geo: ThreeGpp, pc: PowerControl, tol: Tolerances) -> Self {
        ThreeGppLaplace {
            geo,
            p0: pc.p0,
            tx_los: Powered::new(geo.law(LinkType::Los), pc.epsilon),
            tx_nlos: Powered::new(geo.law(LinkType::Nlos), pc.epsilon),
            tol,
        }
    }

    pub fn geometry(&self) -> &ThreeGpp {
        &self.geo
    }

    /// `∫ [1 + (s·p0·ζ(u)^ε)⁻¹·ζ_path(x)]⁻¹ f_{R_z}(u) du` over both serving
    /// link types of the interferer, with the case-truncated densities.
    pub fn expectation_over_rz(&self, s: f64, x: f64, path: LinkType) -> Result<f64> {
        if !(s >= 0.0) {
            return Err(Error::domain("s", s, "s ≥ 0"));
        }
        InterfererDistanceCase::new(path, x, self.geo.d1())?;
        Ok(self.expectation(s, x, path))
    }

    fn expectation(&self, s: f64, x: f64, path: LinkType) -> f64 {
        let c = s * self.p0 / self.geo.law(path).eval(x);
        if c == 0.0 {
            return 0.0;
        }
        let (bl, bn) = self.geo.interferer_bounds(path, x);
        let g = &self.geo;
        let d1 = g.d1();
        let y1 = g.y1();
        let tol = self.tol.inner;
        let mut sum = 0.0;
        if bl > 0.0 {
            let tx = self.tx_los;
            sum += best(integrate_adaptive(
                |u| saturate(c * tx.at(u)) * g.los1(u),
                0.0,
                bl,
                tol,
            ));
        }
        let tx = self.tx_nlos;
        let f = |u: f64| saturate(c * tx.at(u)) * g.serving(u, LinkType::Nlos);
        let hi = bn.min(g.nlos_cutoff());
        let pts = split_points(0.0, hi, &[y1, d1]);
        sum + integrate_pieces(f, &pts, tol)
    }

    /// `∫_{lo}^{hi} w(x)·E(x)·x dx`; `hi = ∞` is handled by the semi-infinite
    /// transform.
    fn ring<W: Fn(f64) -> f64>(&self, s: f64, path: LinkType, lo: f64, hi: f64, w: W) -> f64 {
        let f = |x: f64| {
            let wx = w(x);
            if wx <= 0.0 {
                0.0
            } else {
                wx * self.expectation(s, x, path) * x
            }
        };
        let tol = self.tol.middle;
        if hi.is_finite() {
            if hi <= lo {
                return 0.0;
            }
            let y1 = self.geo.y1();
            let pts = split_points(lo, hi, &[y1]);
            integrate_pieces(f, &pts, tol)
        } else {
            best(integrate_semi_infinite(f, lo, tol))
        }
    }

    fn finish(&self, exponent: f64) -> f64 {
        (-2.0 * PI * self.geo.lambda() * exponent).exp()
    }

    /// Transform for a LoS serving link at `r ≤ d1`: LoS interferers on
    /// `(r, d1)`, NLoS interferers beyond `r1`.
    pub fn t1l(&self, s: f64, r: f64) -> Result<f64> {
        self.check(s, r, ServingCase::L1)?;
        Ok(self.t1l_unchecked(s, r))
    }

    fn t1l_unchecked(&self, s: f64, r: f64) -> f64 {
        let d1 = self.geo.d1();
        let r1 = self.geo.r1(r);
        let e = self.ring(s, LinkType::Los, r, d1, |x| 1.0 - x / d1)
            + self.ring(s, LinkType::Nlos, r1, d1, |x| x / d1)
            + self.ring(s, LinkType::Nlos, d1, f64::INFINITY, |_| 1.0);
        self.finish(e)
    }

    /// Transform for an NLoS serving link at `r ≤ d1`. Beyond `y1` no LoS
    /// interferer can have a larger path loss than the serving link.
    pub fn t1nl(&self, s: f64, r: f64) -> Result<f64> {
        self.check(s, r, ServingCase::NL1)?;
        Ok(self.t1nl_unchecked(s, r))
    }

    fn t1nl_unchecked(&self, s: f64, r: f64) -> f64 {
        let d1 = self.geo.d1();
        let mut e = self.ring(s, LinkType::Nlos, r, d1, |x| x / d1)
            + self.ring(s, LinkType::Nlos, d1, f64::INFINITY, |_| 1.0);
        if r <= self.geo.y1() {
            let r2 = self.geo.r2(r);
            e += self.ring(s, LinkType::Los, r2, d1, |x| 1.0 - x / d1);
        }
        self.finish(e)
    }

    /// Transform for an NLoS serving link at `r > d1`.
    pub fn t2nl(&self, s: f64, r: f64) -> Result<f64> {
        self.check(s, r, ServingCase::NL2)?;
        Ok(self.t2nl_unchecked(s, r))
    }

    fn t2nl_unchecked(&self, s: f64, r: f64) -> f64 {
        let e = self.ring(s, LinkType::Nlos, r, f64::INFINITY, |_| 1.0);
        self.finish(e)
    }

    /// Dispatches on the serving case without argument checks.
    pub(crate) fn by_case(&self, case: ServingCase, s: f64, r: f64) -> f64 {
        if s == 0.0 {
            return 1.0;
        }
        match case {
            ServingCase::L1 => self.t1l_unchecked(s, r),
            ServingCase::NL1 => self.t1nl_unchecked(s, r),
            ServingCase::NL2 => self.t2nl_unchecked(s, r),
        }
    }

    fn check(&self, s: f64, r: f64, case: ServingCase) -> Result<()> {
        if !(s >= 0.0 && s.is_finite()) {
            return Err(Error::domain("s", s, "finite and ≥ 0"));
        }
        let d1 = self.geo.d1();
        let ok = match case {
            ServingCase::L1 | ServingCase::NL1 => r > 0.0 && r <= d1,
            ServingCase::NL2 => r > d1 && r.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::domain(
                "r",
                r,
                "serving distance outside the case's band",
            ))
        }
    }
}

/// Laplace transform for arbitrary profiles and piecewise models, built on
/// [`ServingDistance`].
#[derive(Debug, Clone)]
pub struct GenericLaplace {
    sd: ServingDistance,
    pc: PowerControl,
    tol: Tolerances,
    kinks: Vec<f64>,
}

impl GenericLaplace {
    pub fn new(sd: ServingDistance, pc: PowerControl, tol: Tolerances) -> Self {
        let kinks = sd.kinks();
        GenericLaplace { sd, pc, tol, kinks }
    }

    pub fn serving(&self) -> &ServingDistance {
        &self.sd
    }

    /// Expectation over an interferer's serving link at the end of a `path`
    /// link of length `x`.
    pub fn expectation(&self, s: f64, x: f64, path: LinkType) -> f64 {
        let model = self.sd.model();
        let zp = model.attenuation(x, path);
        let c = s * self.pc.p0 / zp;
        if c == 0.0 {
            return 0.0;
        }
        let eps = self.pc.epsilon;
        let mut sum = 0.0;
        for link in LinkType::BOTH {
            let hi = model.inverse(link, zp).min(self.sd.cutoff(link));
            if hi <= 0.0 {
                continue;
            }
            let f = |u: f64| {
                let a = c * model.attenuation(u, link).powf(eps);
                saturate(a) * self.sd.density(u, link)
            };
            let pts = split_points(0.0, hi, &self.kinks);
            sum += integrate_pieces(f, &pts, self.tol.inner);
        }
        sum
    }

    /// `L(s)` for a serving link with path loss `serving_zeta`.
    pub fn laplace(&self, s: f64, serving_zeta: f64) -> f64 {
        if s == 0.0 {
            return 1.0;
        }
        let model = self.sd.model();
        let profile = *self.sd.profile();
        let mut e = 0.0;
        for path in LinkType::BOTH {
            let lo = model.inverse(path, serving_zeta);
            let hi = match path {
                LinkType::Los => self.sd.los_end(),
                LinkType::Nlos => f64::INFINITY,
            };
            if hi <= lo {
                continue;
            }
            let f = |x: f64| {
                let pl = profile.los_prob(x);
                let w = match path {
                    LinkType::Los => pl,
                    LinkType::Nlos => 1.0 - pl,
                };
                if w <= 0.0 {
                    0.0
                } else {
                    w * self.expectation(s, x, path) * x
                }
            };
            let mut pts = self.x_kinks(lo);
            if hi.is_finite() {
                pts.retain(|&p| p < hi);
                pts.push(hi);
                e += integrate_pieces(f, &pts, self.tol.middle);
            } else {
                let last = *pts.last().expect("non-empty");
                e += integrate_pieces(f, &pts, self.tol.middle);
                e += best(integrate_semi_infinite(f, last, self.tol.middle));
            }
        }
        (-2.0 * PI * self.sd.lambda() * e).exp()
    }

    /// `lo` followed by every kink above it.
    fn x_kinks(&self, lo: f64) -> Vec<f64> {
        let mut pts = Vec::with_capacity(self.kinks.len() + 1);
        pts.push(lo);
        pts.extend(self.kinks.iter().copied().filter(|&k| k > lo));
        pts
    }
}

/// `G(a, b) = ∫_a^b t^m/(1+t^α) dt` for `0 ≤ a ≤ b ≤ ∞`.
///
/// Power series below `y = 1/2`, a cubic Hermite table with exact
/// derivatives on `[1/2, 2]`, and the expansion in `t^{−α}` above 2. The
/// upper expansion is only ever differenced, so its constant never appears.
#[derive(Debug, Clone)]
struct RatioIntegral {
    m: f64,
    alpha: f64,
    /// Some exponent `m+1−α(k+1)` vanishes and the upper expansion has a
    /// log term; quadrature is used above 2 instead.
    degenerate: bool,
    values: Vec<f64>,
    slopes: Vec<f64>,
}

const RATIO_LO: f64 = 0.5;
const RATIO_HI: f64 = 2.0;
const RATIO_CELLS: usize = 256;
const SERIES_MAX_TERMS: usize = 400;

impl RatioIntegral {
    fn new(m: f64, alpha: f64) -> Self {
        let degenerate =
            (0..SERIES_MAX_TERMS).any(|k| (m + 1.0 - alpha * (k as f64 + 1.0)).abs() < 1e-6);
        let mut r = RatioIntegral {
            m,
            alpha,
            degenerate,
            values: Vec::with_capacity(RATIO_CELLS + 1),
            slopes: Vec::with_capacity(RATIO_CELLS + 1),
        };
        let h = (RATIO_HI - RATIO_LO) / RATIO_CELLS as f64;
        let mut g = r.lower_series(RATIO_LO);
        for i in 0..=RATIO_CELLS {
            let y = RATIO_LO + i as f64 * h;
            if i > 0 {
                g += kronrod15(|t| r.integrand(t), y - h, y);
            }
            r.values.push(g);
            r.slopes.push(r.integrand(y));
        }
        r
    }

    #[inline]
    fn integrand(&self, t: f64) -> f64 {
        t.powf(self.m) / (1.0 + t.powf(self.alpha))
    }

    /// `Σ (−1)^k y^{m+1+αk}/(m+1+αk)`.
    fn lower_series(&self, y: f64) -> f64 {
        if y <= 0.0 {
            return 0.0;
        }
        let ya = y.powf(self.alpha);
        let mut pow = y.powf(self.m + 1.0);
        let mut sum = 0.0;
        for k in 0..SERIES_MAX_TERMS {
            let term = pow / (self.m + 1.0 + self.alpha * k as f64);
            sum += if k % 2 == 0 { term } else { -term };
            if term <= 1e-17 * sum.abs() {
                break;
            }
            pow *= ya;
        }
        sum
    }

    /// `Σ (−1)^k y^{m+1−α(k+1)}/(m+1−α(k+1))`, which differs from
    /// `∫_0^y` by a constant.
    fn upper_series(&self, y: f64) -> f64 {
        if y == f64::INFINITY {
            return if self.alpha > self.m + 1.0 {
                0.0
            } else {
                f64::INFINITY
            };
        }
        let yi = y.powf(-self.alpha);
        let mut pow = y.powf(self.m + 1.0 - self.alpha);
        let mut sum = 0.0;
        for k in 0..SERIES_MAX_TERMS {
            let term = pow / (self.m + 1.0 - self.alpha * (k as f64 + 1.0));
            sum += if k % 2 == 0 { term } else { -term };
            if term.abs() <= 1e-17 * sum.abs() {
                break;
            }
            pow *= yi;
        }
        sum
    }

    /// `∫_0^y` for `y ≤ 2`.
    fn lower(&self, y: f64) -> f64 {
        if y <= RATIO_LO {
            return self.lower_series(y);
        }
        let h = (RATIO_HI - RATIO_LO) / RATIO_CELLS as f64;
        let t = (y - RATIO_LO) / h;
        let i = (t as usize).min(RATIO_CELLS - 1);
        let s = t - i as f64;
        let s2 = s * s;
        let q = 1.0 - s;
        (1.0 + 2.0 * s) * q * q * self.values[i]
            + s * q * q * h * self.slopes[i]
            + s2 * (3.0 - 2.0 * s) * self.values[i + 1]
            + s2 * (s - 1.0) * h * self.slopes[i + 1]
    }

    fn upper(&self, a: f64, b: f64) -> f64 {
        if self.degenerate {
            let f = |t: f64| self.integrand(t);
            return if b.is_finite() {
                best(integrate_adaptive(f, a, b, 1e-12))
            } else {
                best(integrate_semi_infinite(f, a, 1e-12))
            };
        }
        self.upper_series(b) - self.upper_series(a)
    }

    fn between(&self, a: f64, b: f64) -> f64 {
        if !(b > a) {
            0.0
        } else if b <= RATIO_HI {
            self.lower(b) - self.lower(a)
        } else if a >= RATIO_HI {
            self.upper(a, b)
        } else {
            self.lower(RATIO_HI) - self.lower(a) + self.upper(RATIO_HI, b)
        }
    }
}

/// `w(x) = c0 + c1·x` on `(from, to]`.
#[derive(Debug, Clone, Copy)]
struct WeightPiece {
    from: f64,
    to: f64,
    c0: f64,
    c1: f64,
}

/// Everything needed for the closed-form `x` integral along one path type.
#[derive(Debug, Clone)]
struct PathKernel {
    law: PowerLaw,
    pieces: Vec<WeightPiece>,
    first: RatioIntegral,
    second: Option<RatioIntegral>,
}

impl PathKernel {
    fn new(law: PowerLaw, pieces: Vec<WeightPiece>) -> Self {
        let second = pieces
            .iter()
            .any(|p| p.c1 != 0.0)
            .then(|| RatioIntegral::new(2.0, law.exponent));
        PathKernel {
            law,
            first: RatioIntegral::new(1.0, law.exponent),
            second,
            pieces,
        }
    }

    fn end(&self) -> f64 {
        self.pieces.last().map_or(0.0, |p| p.to)
    }

    /// `∫_{x1}^{end} w(x)·x·q/(q + ζ(x)) dx`.
    fn integral(&self, q: f64, x1: f64) -> f64 {
        let beta = (self.law.intercept / q).powf(1.0 / self.law.exponent);
        let mut sum = 0.0;
        for p in &self.pieces {
            let ya = beta * x1.max(p.from);
            let yb = beta * p.to;
            if ya >= yb {
                continue;
            }
            if p.c0 != 0.0 {
                sum += p.c0 * self.first.between(ya, yb) / (beta * beta);
            }
            if let Some(g) = &self.second {
                if p.c1 != 0.0 {
                    sum += p.c1 * g.between(ya, yb) / (beta * beta * beta);
                }
            }
        }
        sum
    }
}

/// Laplace transform with the integration order over interferer distance
/// `x` and interferer serving distance `u` exchanged.
///
/// For LoS probabilities that are linear in distance the `x` integral has a
/// closed form through `∫ t^m/(1+t^α) dt`, leaving a single quadrature over
/// `u` per transform. Applies to single-band models with the linear or
/// single-slope profile and gives the same values as the nested forms.
#[derive(Debug, Clone)]
pub struct SwappedLaplace {
    sd: ServingDistance,
    pc: PowerControl,
    tol: f64,
    kernels: Vec<PathKernel>,
    kinks: Vec<f64>,
}

impl SwappedLaplace {
    pub fn new(sd: ServingDistance, pc: PowerControl, tol: Tolerances) -> Result<Self> {
        let seg = *sd.model().as_single().ok_or_else(|| {
            Error::config("the swapped-order transform needs a single-band path loss model")
        })?;
        let mut kernels = Vec::with_capacity(2);
        match *sd.profile() {
            LosProfile::Linear { d1 } => {
                kernels.push(PathKernel::new(
                    seg.los,
                    vec![WeightPiece {
                        from: 0.0,
                        to: d1,
                        c0: 1.0,
                        c1: -1.0 / d1,
                    }],
                ));
                kernels.push(PathKernel::new(
                    seg.nlos,
                    vec![
                        WeightPiece {
                            from: 0.0,
                            to: d1,
                            c0: 0.0,
                            c1: 1.0 / d1,
                        },
                        WeightPiece {
                            from: d1,
                            to: f64::INFINITY,
                            c0: 1.0,
                            c1: 0.0,
                        },
                    ],
                ));
            }
            LosProfile::SingleSlope => kernels.push(PathKernel::new(
                seg.nlos,
                vec![WeightPiece {
                    from: 0.0,
                    to: f64::INFINITY,
                    c0: 1.0,
                    c1: 0.0,
                }],
            )),
            LosProfile::Exponential { .. } => {
                return Err(Error::config(
                    "the swapped-order transform needs a LoS probability linear in distance",
                ))
            }
        }
        let kinks = sd.kinks();
        Ok(SwappedLaplace {
            sd,
            pc,
            tol: tol.inner,
            kernels,
            kinks,
        })
    }

    /// True for single-band models with the linear or single-slope profile.
    pub fn applies(model: &PathLossModel, profile: &LosProfile) -> bool {
        model.as_single().is_some()
            && matches!(profile, LosProfile::Linear { .. } | LosProfile::SingleSlope)
    }

    pub fn serving(&self) -> &ServingDistance {
        &self.sd
    }

    /// `L(s)` for a serving link with path loss `serving_zeta`.
    pub fn laplace(&self, s: f64, serving_zeta: f64) -> f64 {
        let k = s * self.pc.p0;
        if k == 0.0 {
            return 1.0;
        }
        let model = self.sd.model();
        let eps = self.pc.epsilon;
        let mut e = 0.0;
        for ker in &self.kernels {
            let lo = ker.law.inverse(serving_zeta);
            let end = ker.end();
            if lo >= end {
                continue;
            }
            for link in LinkType::BOTH {
                let mut hi = self.sd.cutoff(link);
                if end.is_finite() {
                    hi = hi.min(model.inverse(link, ker.law.eval(end)));
                }
                if hi <= 0.0 {
                    continue;
                }
                let f = |u: f64| {
                    let d = self.sd.density(u, link);
                    if d <= 0.0 {
                        return 0.0;
                    }
                    let zu = model.attenuation(u, link);
                    let x1 = lo.max(ker.law.inverse(zu));
                    d * ker.integral(k * zu.powf(eps), x1)
                };
                let mut extra = Vec::with_capacity(self.kinks.len() + 3);
                extra.extend_from_slice(&self.kinks);
                extra.push(model.inverse(link, serving_zeta));
                for p in &ker.pieces {
                    if p.to.is_finite() {
                        extra.push(model.inverse(link, ker.law.eval(p.to)));
                    }
                }
                let pts = split_points(0.0, hi, &extra);
                e += integrate_pieces(f, &pts, self.tol);
            }
        }
        (-2.0 * PI * self.sd.lambda() * e).exp()
    }
}
