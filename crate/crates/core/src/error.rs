use std::io;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unsupported dimension {0} (expected 1, 2 or 3)")]
    UnsupportedDimension(usize),

    #[error("unsupported polynomial degree {0} (maximum is {max})", max = crate::MAX_DEGREE)]
    UnsupportedDegree(usize),

    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    #[error("unsupported Gauss-Legendre point count {0} (expected 1..=64)")]
    UnsupportedRule(usize),

    #[error("non-finite value: {0}")]
    NonFinite(String),

    #[error("operation requires an even element count, got {0}")]
    OddElementCount(usize),

    #[error("kernel does not match the field: {0}")]
    KernelMismatch(String),

    #[error("layout mismatch: {0}")]
    LayoutMismatch(String),

    #[error("evaluation mesh {eval_n} is not a multiple of {n}")]
    NotAMultiple { eval_n: usize, n: usize },

    #[error("invalid kernel parameters: {0}")]
    InvalidKernel(String),

    #[error("malformed file: {0}")]
    Format(String),

    #[error("unknown test function `{0}`")]
    UnknownFunction(String),

    #[error("unknown experiment case `{0}`")]
    UnknownCase(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}
