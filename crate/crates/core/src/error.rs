use thiserror::Error;

/// Errors produced by the analysis kernels.
#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("axis {axis} out of range for {n_params} parameters")]
    AxisOutOfRange { axis: usize, n_params: usize },
    #[error("level {level} out of range (depth {depth})")]
    LevelOutOfRange { level: usize, depth: usize },
    #[error("invalid dyadic interval: offset {offset} at level {level}")]
    InvalidInterval { level: usize, offset: usize },
    #[error("rectangle finer than grid: level {level} exceeds depth {depth}")]
    RectangleTooFine { level: usize, depth: usize },
    #[error("invalid axis subset: {0}")]
    InvalidAxisSubset(String),
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("instance too large for exhaustion: {cells} cells (limit {limit})")]
    InstanceTooLarge { cells: usize, limit: usize },
    #[error("repeated axis {0} in commutator axis list")]
    RepeatedAxis(usize),
    #[error("operation would truncate finest-level content: {0}")]
    Truncation(String),
    #[error("nonpositive length {0}")]
    NonPositiveLength(f64),
    #[error("iteration did not converge within {iterations} steps (residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
