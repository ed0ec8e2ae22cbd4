use thiserror::Error;

/// Errors produced by the tensor, jet, function and report layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("size guard exceeded: {0}")]
    Size(String),

    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("wrong arity: expected {expected} indices, got {got}")]
    Arity { expected: usize, got: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("cannot contract an order-0 tensor")]
    ContractScalar,

    #[error("domain violation: {0}")]
    Domain(String),

    #[error("invalid function spec: {0}")]
    InvalidSpec(String),

    #[error("matrix is not positive definite")]
    NotPositiveDefinite,

    #[error("degree mismatch: function has degree {degree}, requested order {order}")]
    DegreeMismatch { degree: f64, order: usize },

    #[error("out of range: {0}")]
    Range(String),

    #[error("zero capital: allocation undefined")]
    ZeroCapital,
}

pub type Result<T> = std::result::Result<T, Error>;
