//! Error type shared across the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("variable index {index} out of range for {nvars} variables")]
    VariableOutOfRange { index: usize, nvars: usize },

    #[error("polynomial term cap exceeded (cap {cap})")]
    TermCapExceeded { cap: usize },

    #[error("point has non-finite coordinates")]
    NonFinitePoint,

    #[error("parse error at byte {offset}: {message}")]
    Parse { offset: usize, message: String },

    #[error("invalid structure: {0}")]
    InvalidStructure(String),

    #[error("invalid map: {0}")]
    InvalidMap(String),

    #[error("horizontal fields rank-deficient at {point:?} (rank {rank})")]
    RankDeficientHorizontal { point: Vec<f64>, rank: usize },

    #[error("bracket-generating condition fails at {point:?}: rank saturated at {stalled_rank}")]
    NotBracketGenerating { point: Vec<f64>, stalled_rank: usize },

    #[error("frame matrix near-singular at {point:?} (condition number {condition:.3e})")]
    NearSingularFrame { point: Vec<f64>, condition: f64 },

    #[error("supplied completion is not adapted at {point:?}: {detail}")]
    NotAdapted { point: Vec<f64>, detail: String },

    #[error("singular locus too close to {point:?}: {detail}")]
    SingularProximity { point: Vec<f64>, detail: String },

    #[error("region touches a singular locus: {0}")]
    SingularRegion(String),

    #[error("residual check failed: {0}")]
    ResidualCheckFailed(String),

    #[error("level-{level} Gram matrix not positive definite (min eigenvalue {min_eigenvalue:.3e})")]
    NotPositiveDefinite { level: usize, min_eigenvalue: f64 },

    #[error("structure is not corank one: rank {rank}, dimension {dim}")]
    NotCorankOne { rank: usize, dim: usize },

    #[error("horizontal brackets degenerate at {point:?}: not bracket generating at step 2")]
    DegenerateBrackets { point: Vec<f64> },

    #[error("target vector does not lie in level {level} of the flag (residual {residual:.3e})")]
    TargetOutsideLevel { level: usize, residual: f64 },
}

/// Process exit code classification used by the command-line front end:
/// 2 validation, 3 singular or ill-conditioned input point, 4 internal
/// inconsistency.
impl Error {
    pub fn exit_code(&self) -> i32 {
        use Error::*;
        match self {
            DimensionMismatch { .. }
            | VariableOutOfRange { .. }
            | TermCapExceeded { .. }
            | NonFinitePoint
            | Parse { .. }
            | InvalidStructure(_)
            | InvalidMap(_)
            | NotAdapted { .. }
            | NotCorankOne { .. }
            | TargetOutsideLevel { .. } => 2,
            RankDeficientHorizontal { .. }
            | NotBracketGenerating { .. }
            | NearSingularFrame { .. }
            | SingularProximity { .. }
            | SingularRegion(_)
            | DegenerateBrackets { .. } => 3,
            ResidualCheckFailed(_) | NotPositiveDefinite { .. } => 4,
        }
    }
}
