use thiserror::Error;

use crate::dsl::ParseError;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,

    #[error("ambient index count must be between 1 and {max}, got {n}", max = crate::subset::MAX_INDEX)]
    IndexCount { n: usize },

    #[error("index {index} is outside 1..={n}")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("invalid term: {0}")]
    InvalidTerm(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("expansion would produce {terms} terms, more than the limit of {limit}")]
    ResourceLimit { terms: u128, limit: u128 },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid norm: {0}")]
    Norm(String),

    #[error("internal invariant violated: {0}")]
    Internal(String),

    #[error(transparent)]
    Parse(#[from] ParseError),
}
