use alloc::string::String;
use alloc::vec::Vec;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("index {index} out of range (must be < {limit})")]
    IndexOutOfRange { index: usize, limit: usize },

    #[error("M must be even ≥ 4 (got {0})")]
    InvalidGridSize(usize),

    #[error("unsupported dimension n = {0}")]
    UnsupportedDimension(usize),

    #[error("ensemble violates σ-consistency: max residual {residual:e}")]
    ConsistencyViolation { residual: f64 },

    #[error("coefficient matrix at k = {index:?} lacks the w_k row structure: residual {residual:e}")]
    StructureViolation { index: Vec<usize>, residual: f64 },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("Gram matrix is ill-conditioned (condition estimate {condition:e})")]
    IllConditioned { condition: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
