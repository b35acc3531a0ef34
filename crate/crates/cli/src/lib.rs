//! Command-line front end for `ulcov-core`: configuration files, grid
//! sweeps in both evaluation modes, CSV output and the figure recipes.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod figures;
pub mod grid;
pub mod sweep;

pub use config::{load_config, RunConfig, Settings};
pub use error::CliError;
pub use sweep::{csv_string, run_sweep, write_csv, Row};
