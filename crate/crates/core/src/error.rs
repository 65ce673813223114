use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// coth(r/2) is unbounded below the squeeze cutoff; use the r = 0 route.
    #[error("squeeze magnitude r = {r:e} is at or below the cutoff {cutoff:e}; use the displaced-thermal (r = 0) evaluator")]
    DegenerateSqueeze { r: f64, cutoff: f64 },

    #[error("normalisation vanishes: {0}")]
    ZeroDenominator(&'static str),

    #[error("negative discriminant {0:e} in the |alpha| stationarity condition")]
    NegativeDiscriminant(f64),

    #[error("no interior minimum in |alpha|: r = {r} must exceed ln(2 nbar + 1)/2 = {threshold}")]
    ExistenceViolation { r: f64, threshold: f64 },

    #[error("Fock dimension {0} is too small (need at least 4)")]
    DimensionTooSmall(usize),

    #[error("Hermitian eigendecomposition failed: {0}")]
    EigenFailure(String),

    #[error("truncation tail {tail:e} still above {target:e} at the dimension cap {dim_max}")]
    TruncationError { dim_max: usize, tail: f64, target: f64 },

    #[error("parameters outside the oracle verification envelope: {0}")]
    OutsideEnvelope(String),
}
