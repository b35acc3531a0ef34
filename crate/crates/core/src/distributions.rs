//! Serving-distance densities of the typical UE and the truncated densities
//! of an interfering UE's own serving distance.
//!
//! [`ServingDistance`] handles any profile and piecewise model by computing
//! void probabilities from `∫ Pr^L(u)·2πu du`; [`ThreeGpp`] holds the
//! closed forms for the linear profile on a single-band model.

use alloc::vec::Vec;

#[allow(unused_imports)]
use crate::math::*;
use crate::pathloss::{LinkType, LosProfile, PathLossModel, PowerLaw};
use crate::quadrature::{best, integrate_adaptive, integrate_pieces, integrate_semi_infinite};
use crate::{Error, Result};

/// Relative tolerance of the numeric LoS/NLoS mass integrals.
pub const MASS_TOL: f64 = 1e-8;

/// Void exponent beyond which a density is treated as zero.
const NEGLIGIBLE_EXPONENT: f64 = 60.0;

/// One additive piece of the serving-distance density: a link type on the
/// `segment`-th distance band (1-based), see [`ServingDistance::segments`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ServingComponent {
    pub link: LinkType,
    pub segment: usize,
}

/// How [`ServingDistance`] obtains `∫₀^ρ Pr^L(u)·2πu du`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MassMethod {
    /// Closed form when the profile has one, quadrature otherwise.
    Auto,
    /// Always adaptive quadrature.
    Quadrature,
}

/// Generic serving-distance density for any profile and model.
///
/// The LoS component at `r` is the probability that no LoS BS lies closer
/// than `r` and no NLoS BS has smaller path loss, times the LoS intensity
/// `Pr^L(r)·2πλr`; the NLoS component is symmetric.
#[derive(Debug, Clone)]
pub struct ServingDistance {
    model: PathLossModel,
    profile: LosProfile,
    lambda: f64,
    method: MassMethod,
    los_end: f64,
    los_total: f64,
}

impl ServingDistance {
    pub fn new(model: &PathLossModel, profile: LosProfile, lambda: f64) -> Self {
        Self::with_method(model, profile, lambda, MassMethod::Auto)
    }

    pub fn with_method(
        model: &PathLossModel,
        profile: LosProfile,
        lambda: f64,
        method: MassMethod,
    ) -> Self {
        let los_end = match profile {
            LosProfile::Exponential { r1, r2 } => {
                // 5·exp(−u/R2) < 1e-30 beyond this distance.
                (r1 / core::f64::consts::LN_10).max(r2 * (5e30f64).ln())
            }
            _ => profile.los_support_end(),
        };
        let mut sd = ServingDistance {
            model: model.clone(),
            profile,
            lambda,
            method,
            los_end,
            los_total: 0.0,
        };
        sd.los_total = sd.los_mass(los_end);
        sd
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn model(&self) -> &PathLossModel {
        &self.model
    }

    pub fn profile(&self) -> &LosProfile {
        &self.profile
    }

    /// Distance beyond which LoS links are treated as impossible.
    pub fn los_end(&self) -> f64 {
        self.los_end
    }

    /// `∫₀^ρ Pr^L(u)·2πu du`.
    pub fn los_mass(&self, rho: f64) -> f64 {
        let rho = rho.min(self.los_end);
        if rho <= 0.0 {
            return 0.0;
        }
        if self.method == MassMethod::Auto {
            if let Some(m) = self.profile.los_mass_closed(rho) {
                return m;
            }
        }
        let p = self.profile;
        let pts = self.profile_points(rho);
        integrate_pieces(|u| p.los_prob(u) * 2.0 * PI * u, &pts, MASS_TOL)
    }

    /// `∫₀^ρ (1 − Pr^L(u))·2πu du`.
    pub fn nlos_mass(&self, rho: f64) -> f64 {
        if rho <= 0.0 {
            return 0.0;
        }
        if self.method == MassMethod::Auto && self.profile.los_mass_closed(rho).is_some() {
            return PI * rho * rho - self.los_mass(rho);
        }
        let p = self.profile;
        let f = |u: f64| (1.0 - p.los_prob(u)) * 2.0 * PI * u;
        let head = rho.min(self.los_end);
        let pts = self.profile_points(head);
        let mut m = integrate_pieces(f, &pts, MASS_TOL);
        if rho > head {
            // Pr^L is negligible here.
            m += PI * (rho * rho - head * head);
        }
        m
    }

    fn profile_points(&self, hi: f64) -> Vec<f64> {
        let mut pts = Vec::with_capacity(3);
        pts.push(0.0);
        if let Some(d1) = self.profile.d1() {
            if d1 < hi {
                pts.push(d1);
            }
        }
        pts.push(hi);
        pts
    }

    /// Expected number of BSs whose link to the origin has path loss below
    /// `zeta`.
    pub fn void_exponent(&self, zeta: f64) -> f64 {
        let rho_l = self.model.inverse(LinkType::Los, zeta);
        let rho_n = self.model.inverse(LinkType::Nlos, zeta);
        self.lambda * (self.los_mass(rho_l) + self.nlos_mass(rho_n))
    }

    /// Serving-distance density of the given link type at `r`.
    pub fn density(&self, r: f64, link: LinkType) -> f64 {
        if r <= 0.0 {
            return 0.0;
        }
        let pl = self.profile.los_prob(r);
        let w = match link {
            LinkType::Los => {
                if r > self.los_end {
                    return 0.0;
                }
                pl
            }
            LinkType::Nlos => 1.0 - pl,
        };
        if w <= 0.0 {
            return 0.0;
        }
        let z = self.model.attenuation(r, link);
        let exponent = match link {
            LinkType::Los => {
                self.los_mass(r) + self.nlos_mass(self.model.inverse(LinkType::Nlos, z))
            }
            LinkType::Nlos => {
                self.los_mass(self.model.inverse(LinkType::Los, z)) + self.nlos_mass(r)
            }
        };
        (-self.lambda * exponent).exp() * w * 2.0 * PI * self.lambda * r
    }

    /// Distance bands `[0, d₁, …, ∞]` of the components: the union of the
    /// profile breakpoint and the model's segment boundaries.
    pub fn segments(&self) -> Vec<f64> {
        let mut b = self.breakpoints();
        b.insert(0, 0.0);
        b.push(f64::INFINITY);
        b
    }

    /// Density of one component; zero outside its band.
    pub fn component_density(&self, r: f64, c: ServingComponent) -> f64 {
        let seg = self.segments();
        if c.segment == 0 || c.segment >= seg.len() {
            return 0.0;
        }
        if r > seg[c.segment - 1] && r <= seg[c.segment] {
            self.density(r, c.link)
        } else {
            0.0
        }
    }

    /// Finite profile and model breakpoints, sorted.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut b: Vec<f64> = self.model.boundaries().collect();
        if let Some(d1) = self.profile.d1() {
            b.push(d1);
        }
        b.sort_by(f64::total_cmp);
        b.dedup();
        b
    }

    /// Distances where the densities (or truncation bounds derived from
    /// them) have kinks: the breakpoints and their equal-path-loss images.
    pub fn kinks(&self) -> Vec<f64> {
        let base = self.breakpoints();
        let mut k = base.clone();
        for &b in &base {
            for link in LinkType::BOTH {
                let z = self.model.attenuation(b, link.other());
                k.push(self.model.inverse(link, z));
            }
        }
        k.retain(|v| v.is_finite() && *v > 0.0);
        k.sort_by(f64::total_cmp);
        k.dedup();
        k
    }

    /// Distance beyond which the given component is negligible.
    pub fn cutoff(&self, link: LinkType) -> f64 {
        match link {
            LinkType::Los => self.los_end,
            LinkType::Nlos => ((NEGLIGIBLE_EXPONENT / self.lambda + self.los_total) / PI).sqrt(),
        }
    }

    /// Total probability mass of both components.
    pub fn total_mass(&self, rel_tol: f64) -> f64 {
        let kinks = self.kinks();
        let mut sum = 0.0;
        for link in LinkType::BOTH {
            let hi = self.cutoff(link);
            let pts = crate::quadrature::split_points(0.0, hi, &kinks);
            sum += integrate_pieces(|r| self.density(r, link), &pts, rel_tol);
        }
        sum
    }
}

/// Serving-distance density from the generic evaluator.
pub fn serving_pdf_generic(
    model: &PathLossModel,
    profile: &LosProfile,
    lambda: f64,
    r: f64,
    component: ServingComponent,
) -> Result<f64> {
    check_positive("distance", r)?;
    check_positive("lambda", lambda)?;
    Ok(ServingDistance::new(model, *profile, lambda).component_density(r, component))
}

/// Where the interfering UE's own serving link sits relative to the
/// interference path of length `x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InterfererDistanceCase {
    /// LoS interference path, `0 < x ≤ d1`.
    OneL { x: f64 },
    /// NLoS interference path, `0 < x ≤ d1`.
    OneNL { x: f64 },
    /// NLoS interference path, `x > d1`.
    TwoNL { x: f64 },
}

impl InterfererDistanceCase {
    /// Selects the case for an interference path; a LoS path beyond `d1`
    /// is impossible under the linear profile.
    pub fn new(path: LinkType, x: f64, d1: f64) -> Result<Self> {
        check_positive("x", x)?;
        match path {
            LinkType::Los if x <= d1 => Ok(Self::OneL { x }),
            LinkType::Los => Err(Error::domain("x", x, "LoS interference requires x ≤ d1")),
            LinkType::Nlos if x <= d1 => Ok(Self::OneNL { x }),
            LinkType::Nlos => Ok(Self::TwoNL { x }),
        }
    }

    pub fn x(&self) -> f64 {
        match *self {
            Self::OneL { x } | Self::OneNL { x } | Self::TwoNL { x } => x,
        }
    }

    pub fn path(&self) -> LinkType {
        match self {
            Self::OneL { .. } => LinkType::Los,
            _ => LinkType::Nlos,
        }
    }

    fn validate(&self, d1: f64) -> Result<()> {
        let x = self.x();
        check_positive("x", x)?;
        match self {
            Self::OneL { .. } | Self::OneNL { .. } if x > d1 => {
                Err(Error::domain("x", x, "case requires x ≤ d1"))
            }
            Self::TwoNL { .. } if x <= d1 => Err(Error::domain("x", x, "case requires x > d1")),
            _ => Ok(()),
        }
    }
}

/// Closed-form densities for the linear LoS profile with cut-off `d1` on a
/// single-band path loss model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThreeGpp {
    lambda: f64,
    d1: f64,
    los: PowerLaw,
    nlos: PowerLaw,
    y1: f64,
    pi_lambda: f64,
    cubic: f64,
}

impl ThreeGpp {
    pub fn new(model: &PathLossModel, profile: &LosProfile, lambda: f64) -> Result<Self> {
        let LosProfile::Linear { d1 } = *profile else {
            return Err(Error::config(
                "closed-form densities need the linear LoS profile",
            ));
        };
        let Some(seg) = model.as_single() else {
            return Err(Error::config(
                "closed-form densities need a single-band path loss model",
            ));
        };
        check_positive("lambda", lambda)?;
        let mut g = ThreeGpp {
            lambda,
            d1,
            los: seg.los,
            nlos: seg.nlos,
            y1: 0.0,
            pi_lambda: PI * lambda,
            cubic: 2.0 * PI * lambda / (3.0 * d1),
        };
        g.y1 = g.r1(d1);
        Ok(g)
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn d1(&self) -> f64 {
        self.d1
    }

    /// NLoS distance with the path loss of the LoS cut-off, `r1(d1)`.
    pub fn y1(&self) -> f64 {
        self.y1
    }

    pub fn law(&self, link: LinkType) -> &PowerLaw {
        match link {
            LinkType::Los => &self.los,
            LinkType::Nlos => &self.nlos,
        }
    }

    /// NLoS distance with the LoS path loss at `r`.
    #[inline]
    pub fn r1(&self, r: f64) -> f64 {
        self.nlos.inverse(self.los.eval(r))
    }

    /// LoS distance with the NLoS path loss at `r`.
    #[inline]
    pub fn r2(&self, r: f64) -> f64 {
        self.los.inverse(self.nlos.eval(r))
    }

    /// LoS density on `(0, d1]`.
    #[inline]
    pub fn los1(&self, r: f64) -> f64 {
        if r <= 0.0 || r > self.d1 {
            return 0.0;
        }
        let r1 = self.r1(r);
        let e = -self.pi_lambda * r * r + self.cubic * (r * r * r - r1 * r1 * r1);
        e.exp() * (1.0 - r / self.d1) * 2.0 * self.pi_lambda * r
    }

    /// NLoS density on `(0, d1]`, two branches split at `y1`.
    #[inline]
    pub fn nlos1(&self, r: f64) -> f64 {
        if r <= 0.0 || r > self.d1 {
            return 0.0;
        }
        let e = if r <= self.y1 {
            let r2 = self.r2(r);
            -self.pi_lambda * r2 * r2 + self.cubic * (r2 * r2 * r2 - r * r * r)
        } else {
            -self.pi_lambda * self.d1 * self.d1 / 3.0 - self.cubic * r * r * r
        };
        e.exp() * (r / self.d1) * 2.0 * self.pi_lambda * r
    }

    /// NLoS density beyond `d1`.
    #[inline]
    pub fn nlos2(&self, r: f64) -> f64 {
        if r <= self.d1 {
            return 0.0;
        }
        (-self.pi_lambda * r * r).exp() * 2.0 * self.pi_lambda * r
    }

    /// Serving-distance density of the given link type.
    #[inline]
    pub fn serving(&self, r: f64, link: LinkType) -> f64 {
        match link {
            LinkType::Los => self.los1(r),
            LinkType::Nlos if r <= self.d1 => self.nlos1(r),
            LinkType::Nlos => self.nlos2(r),
        }
    }

    /// Largest serving distance of each link type that an interferer at
    /// the end of a `path` link of length `x` can have: its own serving
    /// path loss may not exceed `ζ_path(x)`.
    #[inline]
    pub fn interferer_bounds(&self, path: LinkType, x: f64) -> (f64, f64) {
        match path {
            LinkType::Los => (x.min(self.d1), self.r1(x)),
            LinkType::Nlos => (self.r2(x).min(self.d1), x),
        }
    }

    /// Density of an interferer's serving distance `u` on a `link` serving
    /// link, truncated per the case.
    pub fn interferer(&self, case: InterfererDistanceCase, link: LinkType, u: f64) -> Result<f64> {
        case.validate(self.d1)?;
        check_positive("u", u)?;
        let (bl, bn) = self.interferer_bounds(case.path(), case.x());
        let bound = match link {
            LinkType::Los => bl,
            LinkType::Nlos => bn,
        };
        Ok(if u <= bound {
            self.serving(u, link)
        } else {
            0.0
        })
    }

    /// Exponent cut-off for the NLoS density beyond `d1`.
    pub fn nlos_cutoff(&self) -> f64 {
        (NEGLIGIBLE_EXPONENT / self.pi_lambda).sqrt().max(self.d1)
    }
}

/// Closed-form serving-distance density for the linear profile.
pub fn serving_pdf_3gpp(
    model: &PathLossModel,
    profile: &LosProfile,
    lambda: f64,
    r: f64,
    link: LinkType,
) -> Result<f64> {
    check_positive("distance", r)?;
    Ok(ThreeGpp::new(model, profile, lambda)?.serving(r, link))
}

/// Density of an interferer's own serving distance for the given case.
pub fn interferer_pdf(
    model: &PathLossModel,
    profile: &LosProfile,
    lambda: f64,
    case: InterfererDistanceCase,
    link: LinkType,
    u: f64,
) -> Result<f64> {
    ThreeGpp::new(model, profile, lambda)?.interferer(case, link, u)
}

fn check_positive(name: &'static str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(name, v, "finite and > 0"))
    }
}

/// Numeric `∫₀^∞ Pr^L(u)·2πu du` for profiles without a closed form.
pub fn total_los_mass(profile: &LosProfile) -> f64 {
    match profile.d1() {
        None => 0.0,
        Some(d1) => {
            let p = *profile;
            let f = |u: f64| p.los_prob(u) * 2.0 * PI * u;
            best(integrate_adaptive(f, 0.0, d1, MASS_TOL))
                + best(integrate_semi_infinite(f, d1, MASS_TOL))
        }
    }
}
