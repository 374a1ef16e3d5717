use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Malformed input text. `pos` is a byte offset into the input.
    #[error("parse error at position {pos}: expected {expected}, found {found}")]
    Parse {
        pos: usize,
        expected: String,
        found: String,
    },

    /// Well-formed input whose parameters violate a mathematical constraint.
    #[error("constraint violated: {0}")]
    Constraint(String),

    /// Admissible K-theory that no catalog entry realizes with the given
    /// grading and finiteness.
    #[error("not in catalog: {0}")]
    NotInCatalog(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    /// An exact linear-algebra step produced an impossible result. Always a bug.
    #[error("internal consistency failure: {0}")]
    Internal(String),
}

impl Error {
    pub(crate) fn constraint(msg: impl Into<String>) -> Self {
        Error::Constraint(msg.into())
    }

    pub(crate) fn internal(msg: impl Into<String>) -> Self {
        Error::Internal(msg.into())
    }
}
