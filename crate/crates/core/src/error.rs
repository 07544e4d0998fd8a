use thiserror::Error;

/// Errors raised by the arithmetic kernel, the elimination routines and the
/// problem-file parser.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("precision must have at least one digit")]
    InvalidPrecision,
    #[error("operands carry different scalar kinds ({left} vs {right})")]
    MixedKinds { left: String, right: String },
    #[error("shape mismatch in {op}: {left:?} vs {right:?}")]
    ShapeMismatch {
        op: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },
    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("zero or negligible pivot at elimination step {step}")]
    Singular { step: usize },
    #[error("inconsistent system: equation {row} reduces to 0 = nonzero")]
    Inconsistent { row: usize },
    #[error("zero diagonal entry at row {row} of triangular system")]
    ZeroDiagonal { row: usize },
    #[error("matrix is not symmetric positive definite (pivot {step} is not positive)")]
    NotPositiveDefinite { step: usize },
    #[error("irrational square root at step {step}; use the squared-form (L, D) factorization")]
    IrrationalRoot { step: usize },
    #[error("elementary step list contains a row swap; report the permutation separately")]
    SwapInSteps,
    #[error("invalid elementary step: {0}")]
    InvalidStep(String),
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
