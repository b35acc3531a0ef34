#[allow(unused_imports)]
use crate::math::*;
use crate::pathloss::{LosProfile, PathLossModel, PowerControl};
use crate::{Error, Result};

/// Small-scale fading of every link's power gain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Fading {
    /// Unit-mean exponential power gain.
    Rayleigh,
    /// Unit-mean Ricean power gain with linear K factor.
    Ricean { k: f64 },
}

/// Everything that defines a network: densities, propagation, power
/// control, noise and fading.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkScenario {
    /// BS density, BS/km².
    pub lambda: f64,
    /// UE density divided by BS density.
    pub ue_density_ratio: f64,
    /// Noise power, mW.
    pub noise: f64,
    pub model: PathLossModel,
    pub profile: LosProfile,
    pub power: PowerControl,
    pub fading: Fading,
}

/// −76 dBm.
pub const DEFAULT_P0_MW: f64 = 2.511_886_431_509_58e-8;
/// −99 dBm: thermal noise over 10 MHz plus a 5 dB noise figure.
pub const DEFAULT_NOISE_MW: f64 = 1.258_925_411_794_167_2e-10;
pub const DEFAULT_UE_DENSITY_RATIO: f64 = 100.0;

impl NetworkScenario {
    /// 3GPP path loss with the linear LoS profile (`d1 = 0.3 km`),
    /// Rayleigh fading, −76 dBm `p0` and −99 dBm noise.
    pub fn three_gpp(lambda: f64, epsilon: f64) -> Self {
        NetworkScenario {
            lambda,
            ue_density_ratio: DEFAULT_UE_DENSITY_RATIO,
            noise: DEFAULT_NOISE_MW,
            model: PathLossModel::three_gpp(),
            profile: LosProfile::linear_default(),
            power: PowerControl {
                p0: DEFAULT_P0_MW,
                epsilon,
            },
            fading: Fading::Rayleigh,
        }
    }

    /// NLoS-only baseline: one `10^{14.54} r^{3.75}` law, no LoS links.
    pub fn single_slope(lambda: f64, epsilon: f64) -> Self {
        let mut s = Self::three_gpp(lambda, epsilon);
        s.model = PathLossModel::single_slope(10f64.powf(14.54), 3.75)
            .expect("default single-slope law is valid");
        s.profile = LosProfile::SingleSlope;
        s
    }

    pub fn with_lambda(&self, lambda: f64) -> Self {
        NetworkScenario {
            lambda,
            ..self.clone()
        }
    }

    pub fn with_epsilon(&self, epsilon: f64) -> Self {
        let mut s = self.clone();
        s.power.epsilon = epsilon;
        s
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return Err(Error::domain("lambda", self.lambda, "finite and > 0"));
        }
        if !(self.ue_density_ratio >= 10.0 && self.ue_density_ratio.is_finite()) {
            return Err(Error::domain(
                "ue_density_ratio",
                self.ue_density_ratio,
                "finite and ≥ 10",
            ));
        }
        if !(self.noise >= 0.0 && self.noise.is_finite()) {
            return Err(Error::domain("noise", self.noise, "finite and ≥ 0"));
        }
        if let Fading::Ricean { k } = self.fading {
            if !(k >= 1.0 && k.is_finite()) {
                return Err(Error::domain("Ricean K (linear)", k, "K ≥ 1, i.e. ≥ 0 dB"));
            }
        }
        self.profile.validate()?;
        self.power.validate()
    }

    /// True when the closed-form evaluator applies: linear LoS profile on a
    /// single-band path loss model with Rayleigh fading.
    pub fn is_closed_form(&self) -> bool {
        matches!(self.profile, LosProfile::Linear { .. })
            && self.model.as_single().is_some()
            && self.fading == Fading::Rayleigh
    }
}
