use alloc::string::String;
use core::fmt;

/// Errors raised by the core library.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    Domain {
        quantity: &'static str,
        value: f64,
        expected: &'static str,
    },
    /// A model or scenario parameter is inconsistent.
    Config(String),
    /// Adaptive quadrature hit its subdivision limit.
    NonConvergence { estimate: f64, error: f64 },
}

pub type Result<T> = core::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(quantity: &'static str, value: f64, expected: &'static str) -> Self {
        Error::Domain {
            quantity,
            value,
            expected,
        }
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain {
                quantity,
                value,
                expected,
            } => write!(f, "{quantity} = {value} is out of range ({expected})"),
            Error::Config(msg) => write!(f, "invalid configuration: {msg}"),
            Error::NonConvergence { estimate, error } => write!(
                f,
                "quadrature did not converge (best estimate {estimate:e}, error {error:e})"
            ),
        }
    }
}

impl core::error::Error for Error {}
