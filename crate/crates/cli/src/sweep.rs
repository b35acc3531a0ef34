//! Grid sweeps and CSV output.

use std::io::Write;

use rayon::prelude::*;
use ulcov_core::coverage::CoverageEngine;
use ulcov_core::interference::Tolerances;
use ulcov_core::montecarlo::{empirical_ase, empirical_ccdf, simulate_sinr, McConfig};
use ulcov_core::NetworkScenario;

use crate::config::{db_to_linear, RunConfig, SweepAxis};
use crate::error::CliError;

pub const CSV_HEADER: &str = "lambda_bs_per_km2,threshold_db,epsilon,pcov_analytic,pcov_mc,mc_ci_halfwidth,ase_analytic,ase_mc";

/// One grid point. Quantities that were not requested stay `None`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Row {
    pub lambda: f64,
    pub threshold_db: f64,
    pub epsilon: f64,
    pub pcov_analytic: Option<f64>,
    pub pcov_mc: Option<f64>,
    pub mc_ci_halfwidth: Option<f64>,
    pub ase_analytic: Option<f64>,
    pub ase_mc: Option<f64>,
}

/// Seed of the `index`-th grid point of a density sweep.
pub fn point_seed(seed: u64, index: usize) -> u64 {
    seed ^ (index as u64)
        .wrapping_add(1)
        .wrapping_mul(0x9e37_79b9_7f4a_7c15)
}

fn engine(scenario: &NetworkScenario) -> Result<CoverageEngine, CliError> {
    Ok(CoverageEngine::with_tolerances(
        scenario,
        Tolerances::coarse(),
    )?)
}

fn mc_samples(scenario: &NetworkScenario, drops: usize, seed: u64) -> Result<Vec<f64>, CliError> {
    Ok(simulate_sinr(scenario, &McConfig::with_samples(drops), seed)?.samples)
}

/// Fills the requested columns for one `(scenario, threshold)` pair.
fn fill(
    cfg: &RunConfig,
    scenario: &NetworkScenario,
    engine: Option<&CoverageEngine>,
    samples: Option<&[f64]>,
    threshold_db: f64,
) -> Result<Row, CliError> {
    let t = db_to_linear(threshold_db);
    let mut row = Row {
        lambda: scenario.lambda,
        threshold_db,
        epsilon: scenario.power.epsilon,
        ..Row::default()
    };
    if let Some(e) = engine {
        row.pcov_analytic = Some(e.coverage_probability(t)?);
        if cfg.ase {
            row.ase_analytic = Some(e.ase(scenario.lambda, t)?);
        }
    }
    if let Some(s) = samples {
        let (p, h) = empirical_ccdf(s, t)?;
        row.pcov_mc = Some(p);
        row.mc_ci_halfwidth = Some(h);
        if cfg.ase {
            row.ase_mc = Some(empirical_ase(s, scenario.lambda, t)?);
        }
    }
    Ok(row)
}

/// Evaluates every grid point; rows come back in grid order.
pub fn run_sweep(cfg: &RunConfig) -> Result<Vec<Row>, CliError> {
    match cfg.sweep {
        SweepAxis::ThresholdDb => {
            let sc = &cfg.scenario;
            let engine = cfg.mode.analytic().then(|| engine(sc)).transpose()?;
            let samples = cfg
                .mode
                .monte_carlo()
                .then(|| mc_samples(sc, cfg.drops, cfg.seed))
                .transpose()?;
            cfg.grid
                .par_iter()
                .map(|&tdb| fill(cfg, sc, engine.as_ref(), samples.as_deref(), tdb))
                .collect()
        }
        SweepAxis::Lambda => cfg
            .grid
            .par_iter()
            .enumerate()
            .map(|(i, &lambda)| {
                let sc = cfg.scenario.with_lambda(lambda);
                let engine = cfg.mode.analytic().then(|| engine(&sc)).transpose()?;
                let samples = cfg
                    .mode
                    .monte_carlo()
                    .then(|| mc_samples(&sc, cfg.drops, point_seed(cfg.seed, i)))
                    .transpose()?;
                fill(
                    cfg,
                    &sc,
                    engine.as_ref(),
                    samples.as_deref(),
                    cfg.threshold_db,
                )
            })
            .collect(),
    }
}

fn field(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.8e}")).unwrap_or_default()
}

pub fn write_csv<W: Write>(mut w: W, rows: &[Row]) -> std::io::Result<()> {
    writeln!(w, "{CSV_HEADER}")?;
    for r in rows {
        writeln!(
            w,
            "{:.8e},{:.8e},{:.8e},{},{},{},{},{}",
            r.lambda,
            r.threshold_db,
            r.epsilon,
            field(r.pcov_analytic),
            field(r.pcov_mc),
            field(r.mc_ci_halfwidth),
            field(r.ase_analytic),
            field(r.ase_mc),
        )?;
    }
    Ok(())
}

pub fn csv_string(rows: &[Row]) -> String {
    let mut buf = Vec::new();
    write_csv(&mut buf, rows).expect("writing to memory");
    String::from_utf8(buf).expect("ASCII output")
}
