use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("imbalance ratio undefined: class {0} has no samples")]
    UndefinedImbalance(&'static str),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("degenerate model: weight vector has zero norm")]
    DegenerateModel,
    #[error("empty minibatch")]
    EmptyBatch,
    #[error("all samples of class {0} were eliminated as noise")]
    ClassEliminated(&'static str),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("non-finite value in input at row {row}, column {col}")]
    NonFinite { row: usize, col: usize },
    #[error("insufficient data: {0}")]
    Insufficient(String),
    #[error("model file: {0}")]
    ModelFormat(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
