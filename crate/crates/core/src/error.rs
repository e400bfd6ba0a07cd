use thiserror::Error;

use crate::model::ModelError;
use crate::parser::SourceError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Source(#[from] SourceError),
    /// An exhaustive procedure refused an input larger than its bound.
    #[error("{what}: size {actual} exceeds the configured bound {limit}")]
    BudgetExceeded {
        what: &'static str,
        limit: usize,
        actual: usize,
    },
    #[error("precondition violated: {0}")]
    Precondition(String),
    /// Two independent computations of the same answer disagree.
    #[error("route mismatch: {0}")]
    RouteMismatch(String),
    #[error("unknown label or argument `{0}`")]
    UnknownLabel(String),
    #[error("{format} input, line {line}: {message}")]
    Format {
        format: &'static str,
        line: usize,
        message: String,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn budget(what: &'static str, limit: usize, actual: usize) -> Self {
        Error::BudgetExceeded {
            what,
            limit,
            actual,
        }
    }
}
