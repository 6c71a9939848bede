use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExactlaError {
    #[error("d∘d ≠ 0: composite d_{degree} ∘ d_{upper} has {nonzero} nonzero entries")]
    NonzeroSquare { degree: i64, upper: i64, nonzero: usize },
    #[error("differential in degree {degree} has shape {got:?}, expected {expected:?}")]
    ShapeMismatch {
        degree: i64,
        got: (usize, usize),
        expected: (usize, usize),
    },
    #[error("differential in degree {degree} maps grading {from:?} to {to:?}")]
    GradingNotPreserved {
        degree: i64,
        from: (i64, i64),
        to: (i64, i64),
    },
    #[error("chain map fails to commute with differentials in degree {degree}")]
    NotChainMap { degree: i64 },
    #[error("entry ({row}, {col}) outside a {rows}×{cols} matrix")]
    IndexOutOfRange {
        row: usize,
        col: usize,
        rows: usize,
        cols: usize,
    },
    #[error("prime {prime} divides the denominator of entry ({row}, {col})")]
    PrimeDividesDenominator { prime: u64, row: usize, col: usize },
    #[error("{0} is not a usable prime")]
    NotPrime(u64),
    #[error("matrix format error on line {line}: {message}")]
    Format { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, ExactlaError>;
