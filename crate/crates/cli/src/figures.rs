//! Recipes for the six reference figures.
//!
//! | id   | setup                                                      | output            |
//! |------|------------------------------------------------------------|-------------------|
//! | fig1 | single-slope, λ = 10, ε = 0.7, T ∈ [−10, 20] dB             | analytic and MC   |
//! | fig2 | 3GPP linear, λ ∈ {10, 10³}, ε = 0.7, T ∈ [−10, 20] dB       | analytic and MC   |
//! | fig3 | 3GPP linear, T = 0 dB, ε ∈ {0.6, 0.7, 0.8}, λ sweep         | analytic coverage |
//! | fig4 | as fig3, ASE with T0 = 0 dB, plus λ0/λ1                     | analytic ASE      |
//! | fig5 | exponential profile, ASE vs λ, ε ∈ {0.6, 0.7, 0.8}, λ0/λ1   | MC only           |
//! | fig6 | Ricean K = 15 dB, ASE vs λ, ε ∈ {0.6, 0.7, 0.8}, λ0/λ1      | MC only           |
//!
//! Threshold sweeps use 1 dB steps; density sweeps use 10 points per decade
//! on [1, 10^3.5] BS/km².

use std::fs;
use std::path::{Path, PathBuf};

use crate::config::{RunConfig, Settings};
use crate::error::CliError;
use crate::sweep::{run_sweep, write_csv, Row};

pub const FIGURES: [&str; 6] = ["fig1", "fig2", "fig3", "fig4", "fig5", "fig6"];

/// Slope below which the ASE growth counts as slowed down.
pub const SLOWDOWN_SLOPE: f64 = 0.8;
/// Slope above which the growth counts as recovered.
pub const RECOVERY_SLOPE: f64 = 0.9;

/// One curve of a figure: its file stem and configuration.
#[derive(Debug, Clone)]
pub struct Curve {
    pub name: String,
    pub config: RunConfig,
}

/// ASE regime boundaries of one ε curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Regimes {
    pub epsilon: f64,
    pub lambda0: Option<f64>,
    pub lambda1: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct FigureOutput {
    pub curves: Vec<(Curve, Vec<Row>)>,
    pub regimes: Vec<Regimes>,
}

fn settings(pairs: &[(&str, &str)]) -> Settings {
    let mut s = Settings::new();
    for (k, v) in pairs {
        s.set(k, *v).expect("recipe keys are valid");
    }
    s
}

/// Curves of figure `id`, with `overrides` applied on top of each recipe.
pub fn figure_curves(id: &str, overrides: &Settings) -> Result<Vec<Curve>, CliError> {
    let eps = ["0.6", "0.7", "0.8"];
    let recipes: Vec<(String, Settings)> = match id {
        "fig1" => vec![(
            "fig1".into(),
            settings(&[
                ("mode", "both"),
                ("profile", "single-slope"),
                ("lambda", "10"),
                ("epsilon", "0.7"),
            ]),
        )],
        "fig2" => ["10", "1000"]
            .iter()
            .map(|l| {
                (
                    format!("fig2_lambda{l}"),
                    settings(&[("mode", "both"), ("lambda", l), ("epsilon", "0.7")]),
                )
            })
            .collect(),
        "fig3" | "fig4" => eps
            .iter()
            .map(|e| {
                let mut s = settings(&[("mode", "analytic"), ("sweep", "lambda"), ("epsilon", e)]);
                if id == "fig4" {
                    s.set("ase", "true")?;
                }
                Ok((format!("{id}_eps{e}"), s))
            })
            .collect::<Result<_, CliError>>()?,
        "fig5" | "fig6" => eps
            .iter()
            .map(|e| {
                let mut s = settings(&[
                    ("mode", "montecarlo"),
                    ("sweep", "lambda"),
                    ("ase", "true"),
                    ("epsilon", e),
                ]);
                if id == "fig5" {
                    s.set("profile", "exponential")?;
                } else {
                    s.set("fading", "ricean")?;
                    s.set("ricean_k_db", "15")?;
                }
                Ok((format!("{id}_eps{e}"), s))
            })
            .collect::<Result<_, CliError>>()?,
        other => return Err(CliError::UnknownFigure(other.to_string())),
    };
    recipes
        .into_iter()
        .map(|(name, mut s)| {
            s.extend(overrides);
            Ok(Curve {
                name,
                config: s.resolve()?,
            })
        })
        .collect()
}

/// Local slopes of `ln y` against `ln x`: central differences inside, one
/// sided at the ends; `None` where a neighbour is not positive.
pub fn log_slopes(x: &[f64], y: &[f64]) -> Vec<Option<f64>> {
    let n = x.len();
    (0..n)
        .map(|i| {
            if n < 2 {
                return None;
            }
            let (a, b) = (i.saturating_sub(1), (i + 1).min(n - 1));
            (y[a] > 0.0 && y[b] > 0.0).then(|| (y[b] / y[a]).ln() / (x[b] / x[a]).ln())
        })
        .collect()
}

/// `λ0`: first density whose local slope falls below [`SLOWDOWN_SLOPE`]
/// after having been above it; `λ1`: first density after `λ0` whose slope
/// exceeds [`RECOVERY_SLOPE`].
pub fn slope_regimes(x: &[f64], y: &[f64]) -> (Option<f64>, Option<f64>) {
    let slopes = log_slopes(x, y);
    let mut seen_fast = false;
    let mut lambda0 = None;
    for (i, s) in slopes.iter().enumerate() {
        let Some(s) = *s else { continue };
        match lambda0 {
            None if s >= SLOWDOWN_SLOPE => seen_fast = true,
            None if seen_fast => lambda0 = Some(i),
            Some(_) if s > RECOVERY_SLOPE => return (lambda0.map(|j| x[j]), Some(x[i])),
            _ => {}
        }
    }
    (lambda0.map(|j| x[j]), None)
}

fn ase_column(rows: &[Row]) -> Vec<f64> {
    rows.iter()
        .map(|r| r.ase_analytic.or(r.ase_mc).unwrap_or(0.0))
        .collect()
}

/// Runs every curve of figure `id` without writing anything.
pub fn compute_figure(id: &str, overrides: &Settings) -> Result<FigureOutput, CliError> {
    let curves = figure_curves(id, overrides)?;
    let mut out = FigureOutput {
        curves: Vec::with_capacity(curves.len()),
        regimes: Vec::new(),
    };
    for c in curves {
        let rows = run_sweep(&c.config)?;
        if c.config.ase {
            let x: Vec<f64> = rows.iter().map(|r| r.lambda).collect();
            let (lambda0, lambda1) = slope_regimes(&x, &ase_column(&rows));
            out.regimes.push(Regimes {
                epsilon: c.config.scenario.power.epsilon,
                lambda0,
                lambda1,
            });
        }
        out.curves.push((c, rows));
    }
    Ok(out)
}

/// Writes `<name>.csv` per curve, and `<id>_regimes.csv` for ASE figures,
/// into `dir`; returns the paths written.
pub fn reproduce_figure(
    id: &str,
    overrides: &Settings,
    dir: &Path,
) -> Result<Vec<PathBuf>, CliError> {
    let fig = compute_figure(id, overrides)?;
    fs::create_dir_all(dir)?;
    let mut paths = Vec::new();
    for (c, rows) in &fig.curves {
        let p = dir.join(format!("{}.csv", c.name));
        write_csv(fs::File::create(&p)?, rows)?;
        paths.push(p);
    }
    if !fig.regimes.is_empty() {
        let p = dir.join(format!("{id}_regimes.csv"));
        let mut text = String::from("epsilon,lambda0_bs_per_km2,lambda1_bs_per_km2\n");
        let f = |v: Option<f64>| v.map(|x| format!("{x:.8e}")).unwrap_or_default();
        for r in &fig.regimes {
            text += &format!("{:.8e},{},{}\n", r.epsilon, f(r.lambda0), f(r.lambda1));
        }
        fs::write(&p, text)?;
        paths.push(p);
    }
    Ok(paths)
}
