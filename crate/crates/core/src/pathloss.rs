//! LoS probability profiles, piecewise power-law path loss, fractional
//! power control and the equal-path-loss maps between link types.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use crate::math::*;
use crate::{Error, Result};

/// Propagation condition of a link.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LinkType {
    Los,
    Nlos,
}

impl LinkType {
    pub const BOTH: [LinkType; 2] = [LinkType::Los, LinkType::Nlos];

    pub fn other(self) -> LinkType {
        match self {
            LinkType::Los => LinkType::Nlos,
            LinkType::Nlos => LinkType::Los,
        }
    }
}

/// Distance dependence of the LoS probability `Pr^L(r)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LosProfile {
    /// `1 − r/d1` on `(0, d1]`, zero beyond.
    Linear { d1: f64 },
    /// `1 − 5·exp(−R1/r)` up to `d1 = R1/ln 10`, `5·exp(−r/R2)` beyond,
    /// clamped to `[0, 1]`. The two branches do not meet at `d1`.
    Exponential { r1: f64, r2: f64 },
    /// No LoS links at all.
    SingleSlope,
}

impl LosProfile {
    /// Linear profile with the usual 0.3 km cut-off.
    pub fn linear_default() -> Self {
        LosProfile::Linear { d1: 0.3 }
    }

    /// Exponential profile with `R1 = 0.156 km`, `R2 = 0.03 km`.
    pub fn exponential_default() -> Self {
        LosProfile::Exponential {
            r1: 0.156,
            r2: 0.03,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            LosProfile::Linear { d1 } => positive("d1", d1),
            LosProfile::Exponential { r1, r2 } => {
                positive("R1", r1)?;
                positive("R2", r2)
            }
            LosProfile::SingleSlope => Ok(()),
        }
    }

    /// Breakpoint of the profile, if it has one.
    pub fn d1(&self) -> Option<f64> {
        match *self {
            LosProfile::Linear { d1 } => Some(d1),
            LosProfile::Exponential { r1, .. } => Some(r1 / core::f64::consts::LN_10),
            LosProfile::SingleSlope => None,
        }
    }

    /// `Pr^L(r)` without argument checks.
    #[inline]
    pub fn los_prob(&self, r: f64) -> f64 {
        match *self {
            LosProfile::Linear { d1 } => {
                if r <= d1 {
                    1.0 - r / d1
                } else {
                    0.0
                }
            }
            LosProfile::Exponential { r1, r2 } => {
                let d1 = r1 / core::f64::consts::LN_10;
                let p = if r <= d1 {
                    1.0 - 5.0 * (-r1 / r).exp()
                } else {
                    5.0 * (-r / r2).exp()
                };
                p.clamp(0.0, 1.0)
            }
            LosProfile::SingleSlope => 0.0,
        }
    }

    /// Distance beyond which `Pr^L` vanishes identically.
    pub fn los_support_end(&self) -> f64 {
        match *self {
            LosProfile::Linear { d1 } => d1,
            LosProfile::Exponential { .. } => f64::INFINITY,
            LosProfile::SingleSlope => 0.0,
        }
    }

    /// `∫₀^r Pr^L(u)·2πu du` in closed form, where one is implemented.
    pub fn los_mass_closed(&self, r: f64) -> Option<f64> {
        match *self {
            LosProfile::Linear { d1 } => {
                let x = r.min(d1);
                Some(PI * x * x - 2.0 * PI * x * x * x / (3.0 * d1))
            }
            LosProfile::SingleSlope => Some(0.0),
            LosProfile::Exponential { r1, r2 } => {
                let d1 = r1 / core::f64::consts::LN_10;
                // The far branch must stay below 1 for the clamp to be idle.
                if d1 / r2 < 5f64.ln() {
                    return None;
                }
                // ∫₀^x u·e^{−R1/u} du = x²·E₃(R1/x).
                let near = |x: f64| PI * x * x * (1.0 - 10.0 * expint3(r1 / x));
                let far = |x: f64| (x + r2) * (-x / r2).exp();
                if r <= d1 {
                    Some(near(r))
                } else {
                    Some(near(d1) + 10.0 * PI * r2 * (far(d1) - far(r)))
                }
            }
        }
    }
}

/// `E₃(z)` for `z > 1` by continued fraction.
fn expint3(z: f64) -> f64 {
    debug_assert!(z > 1.0);
    const N: f64 = 3.0;
    let mut b = z + N;
    let mut c = 1.0 / f64::MIN_POSITIVE;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..200 {
        let i = i as f64;
        let an = -i * (N - 1.0 + i);
        b += 2.0;
        d = 1.0 / (an * d + b);
        c = b + an / c;
        let del = c * d;
        h *= del;
        if (del - 1.0).abs() < 1e-16 {
            break;
        }
    }
    h * (-z).exp()
}

/// `A·r^α` with `A` the linear attenuation at 1 km.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerLaw {
    pub intercept: f64,
    pub exponent: f64,
}

impl PowerLaw {
    pub fn new(intercept: f64, exponent: f64) -> Self {
        PowerLaw {
            intercept,
            exponent,
        }
    }

    #[inline]
    pub fn eval(&self, r: f64) -> f64 {
        self.intercept * r.powf(self.exponent)
    }

    /// Distance at which the law reaches `zeta`.
    #[inline]
    pub fn inverse(&self, zeta: f64) -> f64 {
        (zeta / self.intercept).powf(1.0 / self.exponent)
    }
}

/// One distance band `(lower, upper]` of a piecewise path loss model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub lower: f64,
    pub upper: f64,
    pub los: PowerLaw,
    pub nlos: PowerLaw,
}

impl Segment {
    pub fn law(&self, link: LinkType) -> &PowerLaw {
        match link {
            LinkType::Los => &self.los,
            LinkType::Nlos => &self.nlos,
        }
    }
}

/// Piecewise power-law path loss for LoS and NLoS links.
#[derive(Debug, Clone, PartialEq)]
pub struct PathLossModel {
    segments: Vec<Segment>,
}

impl PathLossModel {
    /// Builds a model from `(upper boundary, LoS law, NLoS law)` triples.
    /// The last upper boundary must be `∞`.
    ///
    /// Each link type's path loss must be non-decreasing across segment
    /// boundaries, so that every sub-level set `{r : ζ(r) < z}` is an
    /// interval starting at 0.
    pub fn new(bands: &[(f64, PowerLaw, PowerLaw)]) -> Result<Self> {
        if bands.is_empty() {
            return Err(Error::config("path loss model needs at least one segment"));
        }
        let mut segments = Vec::with_capacity(bands.len());
        let mut lower = 0.0;
        for (i, &(upper, los, nlos)) in bands.iter().enumerate() {
            let last = i + 1 == bands.len();
            if last != (upper == f64::INFINITY) {
                return Err(Error::config(
                    "segment boundaries must be finite except the last, which is infinite",
                ));
            }
            if !(upper > lower) {
                return Err(Error::config("segment boundaries must increase"));
            }
            for law in [los, nlos] {
                positive("path loss intercept", law.intercept)?;
                positive("path loss exponent", law.exponent)?;
            }
            if nlos.exponent < los.exponent {
                return Err(Error::config(
                    "NLoS exponent must not be smaller than the LoS exponent",
                ));
            }
            segments.push(Segment {
                lower,
                upper,
                los,
                nlos,
            });
            lower = upper;
        }
        for w in segments.windows(2) {
            let b = w[0].upper;
            for link in LinkType::BOTH {
                if w[1].law(link).eval(b) < w[0].law(link).eval(b) * (1.0 - 1e-12) {
                    return Err(Error::config(
                        "path loss must not decrease across a segment boundary",
                    ));
                }
            }
        }
        Ok(PathLossModel { segments })
    }

    /// Single-segment model `A^L r^{α^L}` / `A^NL r^{α^NL}`.
    pub fn two_law(los: PowerLaw, nlos: PowerLaw) -> Result<Self> {
        Self::new(&[(f64::INFINITY, los, nlos)])
    }

    /// The 3GPP small-cell laws: 103.8 + 20.9·log10(r) dB for LoS and
    /// 145.4 + 37.5·log10(r) dB for NLoS, r in km.
    pub fn three_gpp() -> Self {
        PathLossModel {
            segments: vec![Segment {
                lower: 0.0,
                upper: f64::INFINITY,
                los: PowerLaw::new(10f64.powf(10.38), 2.09),
                nlos: PowerLaw::new(10f64.powf(14.54), 3.75),
            }],
        }
    }

    /// One law for every link; pair it with [`LosProfile::SingleSlope`].
    pub fn single_slope(intercept: f64, exponent: f64) -> Result<Self> {
        let law = PowerLaw::new(intercept, exponent);
        Self::two_law(law, law)
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    /// Finite segment boundaries.
    pub fn boundaries(&self) -> impl Iterator<Item = f64> + '_ {
        self.segments[..self.segments.len() - 1]
            .iter()
            .map(|s| s.upper)
    }

    /// The single segment of a one-band model.
    pub fn as_single(&self) -> Option<&Segment> {
        match self.segments.as_slice() {
            [s] => Some(s),
            _ => None,
        }
    }

    #[inline]
    fn segment_at(&self, r: f64) -> &Segment {
        if self.segments.len() == 1 {
            return &self.segments[0];
        }
        let i = self.segments.partition_point(|s| s.upper < r);
        &self.segments[i.min(self.segments.len() - 1)]
    }

    /// `ζ(r)` without argument checks.
    #[inline]
    pub fn attenuation(&self, r: f64, link: LinkType) -> f64 {
        self.segment_at(r).law(link).eval(r)
    }

    /// Supremum of `{r : ζ_link(r) < zeta}`.
    pub fn inverse(&self, link: LinkType, zeta: f64) -> f64 {
        for s in &self.segments {
            let law = s.law(link);
            if s.upper == f64::INFINITY || law.eval(s.upper) >= zeta {
                return law.inverse(zeta).clamp(s.lower, s.upper);
            }
        }
        f64::INFINITY
    }
}

/// Fractional power control: transmit power `p0·ζ^ε`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerControl {
    pub p0: f64,
    pub epsilon: f64,
}

impl PowerControl {
    pub fn new(p0: f64, epsilon: f64) -> Result<Self> {
        let pc = PowerControl { p0, epsilon };
        pc.validate()?;
        Ok(pc)
    }

    pub fn validate(&self) -> Result<()> {
        positive("p0", self.p0)?;
        if !(self.epsilon > 0.0 && self.epsilon <= 1.0) {
            return Err(Error::domain("epsilon", self.epsilon, "0 < ε ≤ 1"));
        }
        Ok(())
    }
}

fn positive(name: &'static str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(name, v, "finite and > 0"))
    }
}

fn check_distance(r: f64) -> Result<()> {
    if r > 0.0 && !r.is_nan() {
        Ok(())
    } else {
        Err(Error::domain("distance", r, "r > 0"))
    }
}

/// `Pr^L(r)`.
pub fn los_probability(profile: &LosProfile, r: f64) -> Result<f64> {
    check_distance(r)?;
    Ok(profile.los_prob(r))
}

/// `ζ(r)` for the given link type.
pub fn path_loss(model: &PathLossModel, r: f64, link: LinkType) -> Result<f64> {
    check_distance(r)?;
    Ok(model.attenuation(r, link))
}

/// Transmit power `p0·ζ^ε` in mW.
pub fn tx_power(pc: &PowerControl, zeta: f64) -> Result<f64> {
    if !(zeta > 0.0) {
        return Err(Error::domain("attenuation", zeta, "ζ > 0"));
    }
    Ok(pc.p0 * zeta.powf(pc.epsilon))
}

/// Distance at which the opposite link type has the same path loss as a
/// `from` link at distance `r`.
pub fn cross_boundary(model: &PathLossModel, r: f64, from: LinkType) -> Result<f64> {
    check_distance(r)?;
    Ok(model.inverse(from.other(), model.attenuation(r, from)))
}
