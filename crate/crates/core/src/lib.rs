//! Uplink coverage probability and area spectral efficiency for dense
//! small-cell networks with probabilistic LoS/NLoS path loss and
//! fractional power control.
//!
//! Two independent routes are provided:
//!
//! * [`coverage`] evaluates the stochastic-geometry expressions by
//!   quadrature (closed forms for the linear LoS profile, a generic
//!   evaluator for anything else, and a faster exchanged-order transform
//!   by default);
//! * [`montecarlo`] drops Poisson networks, associates every UE with its
//!   smallest-path-loss BS and samples the uplink SINR at a typical BS.
//!
//! All quantities are linear: distances in km, powers in mW, densities in
//! BS/km². The crate is `no_std` with `alloc` when the default `std`
//! feature is disabled.

#![cfg_attr(not(feature = "std"), no_std)]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

mod error;
mod math;

pub mod coverage;
pub mod distributions;
pub mod interference;
pub mod montecarlo;
pub mod pathloss;
pub mod quadrature;
pub mod scenario;

pub use error::{Error, Result};
pub use pathloss::{LinkType, LosProfile, PathLossModel, PowerControl, PowerLaw};
pub use scenario::{Fading, NetworkScenario};
