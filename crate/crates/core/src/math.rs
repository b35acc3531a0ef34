//! Float methods that work with and without `std`.

#[cfg(not(feature = "std"))]
pub(crate) use num_traits::Float;

pub(crate) const PI: f64 = core::f64::consts::PI;
pub(crate) const LN_2: f64 = core::f64::consts::LN_2;
