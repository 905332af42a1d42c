use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// Malformed input: bad rational text, broken document, invalid belief.
    #[error("parse error: {0}")]
    Parse(String),
    #[error("dimension mismatch: expected {expected}, got {found} ({context})")]
    Dimension {
        expected: usize,
        found: usize,
        context: String,
    },
    #[error("invalid input: {0}")]
    Invalid(String),
    /// An operation was called outside its precondition, e.g. decomposing a
    /// pair that does not dominate.
    #[error("precondition violated: {0}")]
    Precondition(String),
    /// A certificate failed to re-verify. Always a bug.
    #[error("internal inconsistency: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_dim(expected: usize, found: usize, context: impl Into<String>) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::Dimension {
            expected,
            found,
            context: context.into(),
        })
    }
}
