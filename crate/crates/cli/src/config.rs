//! Run configuration: a flat `key=value` file overridden by flags of the
//! same names. Every dB or dBm entry is converted to linear units here.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use ulcov_core::{Fading, LosProfile, NetworkScenario, PathLossModel, PowerControl, PowerLaw};

use crate::error::CliError;
use crate::grid::{parse_grid, parse_number};

/// Every accepted key.
pub const KEYS: &[&str] = &[
    "mode",
    "sweep",
    "grid",
    "lambda",
    "epsilon",
    "threshold_db",
    "ase",
    "p0_dbm",
    "noise_dbm",
    "d1_km",
    "r1_km",
    "r2_km",
    "alpha_los",
    "alpha_nlos",
    "intercept_los_db",
    "intercept_nlos_db",
    "profile",
    "fading",
    "ricean_k_db",
    "ue_density_ratio",
    "drops",
    "seed",
    "out",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Analytic,
    MonteCarlo,
    Both,
}

impl Mode {
    pub fn analytic(self) -> bool {
        matches!(self, Mode::Analytic | Mode::Both)
    }

    pub fn monte_carlo(self) -> bool {
        matches!(self, Mode::MonteCarlo | Mode::Both)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    ThresholdDb,
    Lambda,
}

/// A fully resolved run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub mode: Mode,
    pub sweep: SweepAxis,
    /// Thresholds in dB or densities in BS/km², by `sweep`.
    pub grid: Vec<f64>,
    /// Holds `lambda` for threshold sweeps; replaced per point otherwise.
    pub scenario: NetworkScenario,
    /// Threshold of a density sweep, also the ASE's minimum SINR.
    pub threshold_db: f64,
    pub ase: bool,
    /// Monte Carlo SINR observations per grid point.
    pub drops: usize,
    pub seed: u64,
    pub out: Option<PathBuf>,
}

/// Raw key/value settings, later entries overriding earlier ones.
#[derive(Debug, Clone, Default)]
pub struct Settings {
    map: BTreeMap<String, String>,
}

impl Settings {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, key: &str, value: impl Into<String>) -> Result<(), CliError> {
        if !KEYS.contains(&key) {
            return Err(CliError::UnknownKey(key.to_string()));
        }
        self.map.insert(key.to_string(), value.into());
        Ok(())
    }

    /// Applies every entry of `other` on top of these settings.
    pub fn extend(&mut self, other: &Settings) {
        for (k, v) in &other.map {
            self.map.insert(k.clone(), v.clone());
        }
    }

    /// Reads `key=value` lines; `#` starts a comment.
    pub fn merge_text(&mut self, text: &str) -> Result<(), CliError> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return Err(CliError::Syntax {
                    line: i + 1,
                    text: raw.to_string(),
                });
            };
            self.set(k.trim(), v.trim())?;
        }
        Ok(())
    }

    pub fn merge_file(&mut self, path: &Path) -> Result<(), CliError> {
        let text = std::fs::read_to_string(path)?;
        self.merge_text(&text)
    }

    fn get(&self, key: &str) -> Option<&str> {
        self.map.get(key).map(String::as_str)
    }

    fn number(&self, key: &str, default: f64) -> Result<f64, CliError> {
        match self.get(key) {
            None => Ok(default),
            Some(v) => parse_number(v).ok_or_else(|| CliError::invalid(key, v, "not a number")),
        }
    }

    fn positive(&self, key: &str, default: f64) -> Result<f64, CliError> {
        let v = self.number(key, default)?;
        if v > 0.0 {
            Ok(v)
        } else {
            Err(CliError::invalid(key, &v.to_string(), "must be > 0"))
        }
    }

    fn integer(&self, key: &str, default: u64) -> Result<u64, CliError> {
        match self.get(key) {
            None => Ok(default),
            Some(v) => v
                .parse()
                .map_err(|_| CliError::invalid(key, v, "not a non-negative integer")),
        }
    }

    fn choice<'a>(
        &'a self,
        key: &str,
        default: &'a str,
        options: &[&str],
    ) -> Result<&'a str, CliError> {
        let v = self.get(key).unwrap_or(default);
        if options.contains(&v) {
            Ok(v)
        } else {
            Err(CliError::invalid(
                key,
                v,
                &format!("expected one of {}", options.join(", ")),
            ))
        }
    }

    /// Resolves every setting, falling back to the defaults for unset keys.
    pub fn resolve(&self) -> Result<RunConfig, CliError> {
        let mode = match self.choice("mode", "analytic", &["analytic", "montecarlo", "both"])? {
            "analytic" => Mode::Analytic,
            "montecarlo" => Mode::MonteCarlo,
            _ => Mode::Both,
        };
        let sweep = match self.choice("sweep", "threshold_db", &["threshold_db", "lambda"])? {
            "threshold_db" => SweepAxis::ThresholdDb,
            _ => SweepAxis::Lambda,
        };
        let default_grid = match sweep {
            SweepAxis::ThresholdDb => "lin:-10:20:1",
            SweepAxis::Lambda => "log:1:10^3.5:10",
        };
        let grid = parse_grid("grid", self.get("grid").unwrap_or(default_grid))?;
        if sweep == SweepAxis::Lambda && grid[0] <= 0.0 {
            return Err(CliError::invalid(
                "grid",
                &grid[0].to_string(),
                "densities must be > 0",
            ));
        }

        let lambda = self.positive("lambda", 1000.0)?;
        let epsilon = self.number("epsilon", 0.7)?;
        if !(epsilon > 0.0 && epsilon <= 1.0) {
            return Err(CliError::invalid(
                "epsilon",
                &epsilon.to_string(),
                "ε∈(0,1]",
            ));
        }
        let p0 = dbm_to_mw(self.number("p0_dbm", -76.0)?);
        let noise = dbm_to_mw(self.number("noise_dbm", -99.0)?);
        let alpha_los = self.positive("alpha_los", 2.09)?;
        let alpha_nlos = self.positive("alpha_nlos", 3.75)?;
        let los = PowerLaw::new(
            db_to_linear(self.number("intercept_los_db", 103.8)?),
            alpha_los,
        );
        let nlos = PowerLaw::new(
            db_to_linear(self.number("intercept_nlos_db", 145.4)?),
            alpha_nlos,
        );

        let profile_name = self.choice(
            "profile",
            "linear",
            &["linear", "exponential", "single-slope"],
        )?;
        let (profile, model) = match profile_name {
            "linear" => (
                LosProfile::Linear {
                    d1: self.positive("d1_km", 0.3)?,
                },
                PathLossModel::two_law(los, nlos),
            ),
            "exponential" => (
                LosProfile::Exponential {
                    r1: self.positive("r1_km", 0.156)?,
                    r2: self.positive("r2_km", 0.03)?,
                },
                PathLossModel::two_law(los, nlos),
            ),
            _ => (
                LosProfile::SingleSlope,
                PathLossModel::single_slope(nlos.intercept, nlos.exponent),
            ),
        };
        let model = model.map_err(|e| {
            CliError::invalid("alpha_nlos", &alpha_nlos.to_string(), &e.to_string())
        })?;

        let fading = match self.choice("fading", "rayleigh", &["rayleigh", "ricean"])? {
            "rayleigh" => Fading::Rayleigh,
            _ => {
                let k_db = self.number("ricean_k_db", 15.0)?;
                if k_db < 0.0 {
                    return Err(CliError::invalid(
                        "ricean_k_db",
                        &k_db.to_string(),
                        "K ≥ 0 dB",
                    ));
                }
                Fading::Ricean {
                    k: db_to_linear(k_db),
                }
            }
        };
        let ue_density_ratio = self.number("ue_density_ratio", 100.0)?;
        if !(ue_density_ratio >= 10.0) {
            return Err(CliError::invalid(
                "ue_density_ratio",
                &ue_density_ratio.to_string(),
                "must be ≥ 10",
            ));
        }
        let scenario = NetworkScenario {
            lambda,
            ue_density_ratio,
            noise,
            model,
            profile,
            power: PowerControl { p0, epsilon },
            fading,
        };
        scenario.validate()?;

        if mode.analytic()
            && !matches!(profile, LosProfile::Linear { .. } | LosProfile::SingleSlope)
        {
            return Err(CliError::Config(
                "analytic coverage is not available for the exponential profile; use mode=montecarlo".into(),
            ));
        }
        if mode.analytic() && fading != Fading::Rayleigh {
            return Err(CliError::Config(
                "analytic coverage assumes Rayleigh fading; use mode=montecarlo for ricean".into(),
            ));
        }

        let drops = self.integer("drops", 10_000)? as usize;
        if mode.monte_carlo() && drops == 0 {
            return Err(CliError::invalid("drops", "0", "must be ≥ 1"));
        }
        let ase = self.choice("ase", "false", &["true", "false"])? == "true";
        Ok(RunConfig {
            mode,
            sweep,
            grid,
            scenario,
            threshold_db: self.number("threshold_db", 0.0)?,
            ase,
            drops,
            seed: self.integer("seed", 1)?,
            out: self.get("out").map(PathBuf::from),
        })
    }
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn dbm_to_mw(dbm: f64) -> f64 {
    db_to_linear(dbm)
}

/// Settings from an optional file, then overrides, resolved.
pub fn load_config(
    path: Option<&Path>,
    overrides: &[(&str, String)],
) -> Result<RunConfig, CliError> {
    let mut s = Settings::new();
    if let Some(p) = path {
        s.merge_file(p)?;
    }
    for (k, v) in overrides {
        s.set(k, v.clone())?;
    }
    s.resolve()
}
