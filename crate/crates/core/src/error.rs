//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,

    #[error("root scalar base must be nonzero")]
    ZeroBase,

    #[error("total degree {degree} exceeds cap {cap}")]
    DegreeCapExceeded { degree: usize, cap: usize },

    #[error("term count {terms} exceeds cap {cap}")]
    TermCapExceeded { terms: usize, cap: usize },

    #[error("proportionality divisor polynomial is identically zero")]
    ZeroDivisorPolynomial,

    #[error("precondition violation: {0}")]
    PreconditionViolation(String),

    #[error("syntax error at byte {position}: expected {expected}")]
    SyntaxError { position: usize, expected: String },

    #[error("unknown variable `{name}` at byte {position} (declared nvars = {nvars})")]
    UnknownVariable {
        name: String,
        position: usize,
        nvars: usize,
    },

    #[error("not a polynomial: {reason} at byte {position}")]
    NonPolynomial { position: usize, reason: String },

    #[error("coefficient matrix is singular; an invertible matrix is required for this reduction")]
    SingularMatrix,

    #[error("numeric overflow during evaluation")]
    Overflow,

    #[error("row {row} does not collapse to a single exponential")]
    NotSingleExponential { row: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    /// Exit code for the CLI contract: 3 for invalid input of any kind.
    pub fn exit_code(&self) -> i32 {
        3
    }
}
