use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// A value outside the domain of an operation (polygon abscissa, mismatched lengths).
    #[error("domain error: {0}")]
    Domain(String),
    /// A documented precondition of an operation does not hold.
    #[error("precondition failed: {0}")]
    Precondition(String),
    /// A structural invariant of a data type is violated.
    #[error("invariant violated: {0}")]
    Invariant(String),
    /// Model data that cannot come from a p-divisible group.
    #[error("model violation: {0}")]
    Model(String),
    #[error("parse error: {0}")]
    Parse(String),
    /// The available data is too shallow to decide; never a wrong answer.
    #[error("inconclusive: {0}")]
    Inconclusive(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    /// An identity that theory guarantees failed; always a bug or corrupt input.
    #[error("internal assertion failed: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
