use thiserror::Error;

/// Errors produced by the rearrangement engines and their file formats.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("invalid halfspace: {0}")]
    InvalidHalfspace(String),

    #[error("invalid step function: {0}")]
    InvalidStepFunction(String),

    #[error("invalid lattice function: {0}")]
    InvalidLatticeFunction(String),

    #[error("invalid grid function: {0}")]
    InvalidGridFunction(String),

    #[error("exponent p must be >= 1, got {0}")]
    InvalidExponent(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A polarization would move a positive value outside the grid array.
    #[error("reflected support leaves the grid at index ({i}, {j}); enlarge m")]
    GridOverflow { i: i64, j: i64 },

    #[error("no fixed point reached within {0} sweeps")]
    NoConvergence(usize),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
