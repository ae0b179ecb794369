use thiserror::Error;

use crate::dist::DistError;
use crate::numerics::NumericsError;

/// Failures of the analytic solvers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolveError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("unstable system: load {rho} must be below 1")]
    Unstable { rho: f64 },
    #[error("{0} is only available for exponential service/claims")]
    UnsupportedDistribution(&'static str),
    #[error("wrong regime: {0}")]
    WrongRegime(String),
    #[error("degenerate recursion: {0}")]
    Degenerate(String),
    #[error("Laplace inversion at x = {x} did not settle (tail estimate {tail:e})")]
    InversionTolerance { x: f64, tail: f64 },
    #[error(transparent)]
    Dist(#[from] DistError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

pub(crate) fn require_positive(name: &str, v: f64) -> Result<f64, SolveError> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(SolveError::InvalidParameter(format!(
            "{name} must be positive and finite, got {v}"
        )))
    }
}
