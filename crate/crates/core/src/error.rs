use thiserror::Error;

/// Errors raised by the selection library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix must have at least one row and one column")]
    EmptyMatrix,
    #[error("matrix data has {got} entries, expected {rows}x{cols}")]
    ShapeMismatch { rows: usize, cols: usize, got: usize },
    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("matrix is {rows}x{cols}, expected a square matrix")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not symmetric (max asymmetry {0:e})")]
    NotSymmetric(f64),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("weight {index} is zero")]
    ZeroWeight { index: usize },
    #[error("weight {index} is not finite")]
    NonFiniteWeight { index: usize },
    #[error("weight vector is empty")]
    EmptyWeights,
    #[error("index set is empty")]
    EmptySubset,
    #[error("index {index} is out of range for {len} columns")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("index {0} appears more than once")]
    DuplicateIndex(usize),
    #[error("polynomial is identically zero")]
    ZeroPolynomial,
    #[error("polynomial has a non-finite coefficient")]
    NonFiniteCoefficient,
    #[error("root index {k} out of range for degree {degree}")]
    RootIndexOutOfRange { k: usize, degree: usize },
    #[error("barrier evaluated at a root (p({0}) = 0)")]
    AtRoot(f64),
    #[error("eigenvalue iteration did not converge")]
    NoConvergence,
    #[error("invalid selection size k = {k}: {reason}")]
    InvalidK { k: usize, reason: String },
    #[error("invalid threshold r = {r}: {reason}")]
    InvalidR { r: usize, reason: String },
    #[error("k = {k} exceeds numerical rank {rank}")]
    RankExceeded { k: usize, rank: usize },
    #[error("epsilon must lie in (0, 1), got {0}")]
    InvalidEpsilon(f64),
    #[error("matrix is zero")]
    ZeroMatrix,
    #[error("column {0} is zero")]
    ZeroColumn(usize),
    #[error("operator order {0} exceeds the supported maximum of 30")]
    OrderTooLarge(usize),
    #[error("enumeration of {needed} cases exceeds budget {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },
}

pub type Result<T> = std::result::Result<T, Error>;
