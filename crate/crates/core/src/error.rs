use thiserror::Error;

/// Failures raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Adaptive quadrature could not reach the requested tolerance.
    #[error("quadrature did not converge: estimate {estimate:e} with error {abs_error:e} after {intervals} intervals")]
    Quadrature {
        estimate: f64,
        abs_error: f64,
        intervals: usize,
    },

    /// Any other numerical failure (no bracketing sign change, NaN, ...).
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// The long-time limit of a kernel could not be decided on the sampled horizon.
    #[error("stability classification inconclusive: {0}; extend the time horizon")]
    Inconclusive(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn ensure_finite(name: &str, value: f64) -> Result<()> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(domain(format!("{name} must be finite, got {value}")))
    }
}

pub(crate) fn ensure_nonnegative_time(name: &str, value: f64) -> Result<()> {
    if value.is_finite() && value >= 0.0 {
        Ok(())
    } else {
        Err(domain(format!("{name} must be a finite time >= 0, got {value}")))
    }
}
