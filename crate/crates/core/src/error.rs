use thiserror::Error;

/// Errors raised by the library.
///
/// Every failure of a precondition or of truncation coverage is reported
/// explicitly; no operation extrapolates past the data it was given.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("group mismatch: {0}")]
    GroupMismatch(String),

    #[error("invalid generating set: {0}")]
    InvalidGenerators(String),

    #[error("element {element} is not reached within search radius {radius}")]
    OutsideSearchRadius { element: String, radius: u32 },

    #[error("map is undefined at {0}")]
    Undefined(String),

    #[error("invalid odometer space: {0}")]
    InvalidSpace(String),

    #[error("matrix is not unimodular (det = {0})")]
    NotUnimodular(String),

    #[error("matrix action requires a single base for all coordinates")]
    MixedBases,

    #[error("budget exceeded: {0}")]
    Budget(String),

    #[error("not a partition: {0}")]
    NotPartition(String),

    #[error("cylinders overlap")]
    Overlap,

    #[error("clopen set is empty")]
    EmptySet,

    #[error("refinement needs prefixes deeper than the truncation depth {depth}")]
    DepthExceeded { depth: u32 },

    #[error("pivot {0:e} below threshold: numerically degenerate matrix")]
    DegeneratePivot(f64),

    #[error("reconstruction error {error:e} exceeds tolerance {tol:e}")]
    Reconstruction { error: f64, tol: f64 },

    #[error("truncation exhausted: {0}")]
    Truncation(String),

    #[error("insufficient coverage: {0}")]
    Coverage(String),

    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
