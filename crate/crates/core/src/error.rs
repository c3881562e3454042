use std::path::PathBuf;

use thiserror::Error;

/// Errors raised anywhere in the laboratory.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A computation produced a non-finite value.
    #[error("non-finite value {value} at {location}")]
    NonFinite { location: String, value: f64 },

    /// Adaptive quadrature could not reach the requested tolerance.
    #[error("quadrature did not converge: estimated error {estimate:e} exceeds tolerance {tolerance:e}")]
    Quadrature { estimate: f64, tolerance: f64 },

    /// An iterative solver stopped before reaching its tolerance.
    #[error("{solver} did not converge after {iterations} iterations ({state})")]
    NoConvergence {
        solver: &'static str,
        iterations: usize,
        state: String,
    },

    /// A root bracket could not be established.
    #[error("no sign change on [{lo}, {hi}]: f(lo) = {f_lo:e}, f(hi) = {f_hi:e}")]
    Bracket { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },

    /// The law does not provide an optional capability.
    #[error("{law} does not provide {capability}")]
    Capability { law: String, capability: &'static str },

    /// The initial data or state violates the admissible band.
    #[error("state rejected: {0}")]
    Rejected(String),

    /// The time stepper produced a non-finite field.
    #[error("blow-up at t = {time}: {detail}")]
    BlowUp { time: f64, detail: String },

    /// Two trajectories or fields do not share a grid or cadence.
    #[error("incompatible inputs: {0}")]
    Mismatch(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

/// Returns `value` if finite, otherwise a [`Error::NonFinite`] naming `location`.
pub(crate) fn finite(value: f64, location: impl FnOnce() -> String) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::NonFinite {
            location: location(),
            value,
        })
    }
}
