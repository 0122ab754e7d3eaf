//! Library error type.

use thiserror::Error;

/// Errors reported by state construction, observable construction, and the
/// reconstruction pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("dimension must be at least 2, got {dim}")]
    InvalidDimension { dim: usize },

    #[error("cannot normalize a zero vector")]
    ZeroVector,

    #[error("vector norm {norm} violates the unit-norm invariant")]
    NormViolation { norm: f64 },

    #[error("basis vectors are not orthonormal (max deviation {deviation})")]
    NotOrthonormal { deviation: f64 },

    #[error("matrix is not Hermitian (max deviation {deviation})")]
    NotHermitian { deviation: f64 },

    #[error("eigensolver failed to converge after {sweeps} sweeps")]
    EigenConvergence { sweeps: usize },

    #[error("unbiased-family construction requires a prime dimension, got {dim}")]
    UnsupportedDimension { dim: usize },

    #[error("unbiased-family index {index} out of range (family has {count} bases)")]
    MubIndexOutOfRange { index: usize, count: usize },

    #[error("direction must be a unit 3-vector (norm {norm})")]
    UnnormalizedDirection { norm: f64 },

    #[error("random basis draw produced linearly dependent vectors 10 times in a row")]
    DependentDraws,

    #[error("probabilities must be nonnegative, got {value}")]
    NegativeProbability { value: f64 },

    #[error("probabilities must sum to 1, got {sum}")]
    SimplexViolation { sum: f64 },

    #[error("at least one measured observable is required")]
    EmptyDataSet,

    #[error("observable count {observables} out of range 1..={max} for dimension {dim}")]
    ObservableCountOutOfRange {
        dim: usize,
        observables: usize,
        max: usize,
    },

    #[error(
        "state satisfies no partner regime: b > 0, a* + c != 0, and none of the \
         four symmetry conditions hold"
    )]
    NoPartnerRegime,

    #[error("cannot parse observable spec `{input}`: {reason}")]
    ParseObservable { input: String, reason: String },

    #[error("invalid distribution input: {0}")]
    InvalidInput(String),

    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
}

/// Library result alias.
pub type Result<T> = std::result::Result<T, Error>;
