use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A value outside the mathematical domain of an operation (NaN, infinity, γ ≤ 0).
    #[error("domain error: {0}")]
    Domain(String),

    /// Caller supplied arguments that violate an operation's preconditions.
    #[error("usage error: {0}")]
    Usage(String),

    #[error("series lengths differ: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("{}:{line}: cannot parse field {field}: {message}", path.display())]
    Parse {
        path: PathBuf,
        line: usize,
        field: usize,
        message: String,
    },

    #[error("{origin}:{line}: series has length {found}, expected {expected}")]
    VariableLength {
        origin: String,
        line: usize,
        expected: usize,
        found: usize,
    },

    #[error("dataset {0} contains no series")]
    EmptyDataset(String),

    #[error("class {label} has a single training exemplar")]
    SingletonClass { label: i64 },

    #[error("series of length {0} is too short for the derivative transform (need at least 3)")]
    SeriesTooShort(usize),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
