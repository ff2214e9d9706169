use thiserror::Error;

use crate::numerics::{CubicError, QuadratureError};

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A physical or numerical input is outside its domain.
    #[error("invalid `{field}`: {reason}")]
    Domain { field: &'static str, reason: String },

    #[error(transparent)]
    Quadrature(#[from] QuadratureError),

    #[error(transparent)]
    Cubic(#[from] CubicError),

    #[error("force evaluation failed at t = {t:e} s: {reason}")]
    Force { t: f64, reason: String },

    #[error("step {step} rejected: local error {error:e} exceeds tolerance {tolerance:e}")]
    StepRejected {
        step: usize,
        error: f64,
        tolerance: f64,
    },

    #[error("root search failed: {0}")]
    RootSearch(String),
}

impl Error {
    pub(crate) fn domain(field: &'static str, reason: impl Into<String>) -> Self {
        Error::Domain {
            field,
            reason: reason.into(),
        }
    }
}

/// Rejects non-finite values and values failing `ok`.
pub(crate) fn check(field: &'static str, value: f64, ok: bool, what: &str) -> Result<()> {
    if !value.is_finite() {
        return Err(Error::domain(field, format!("must be finite, got {value}")));
    }
    if !ok {
        return Err(Error::domain(field, format!("must be {what}, got {value:e}")));
    }
    Ok(())
}
