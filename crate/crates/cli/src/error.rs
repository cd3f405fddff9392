use std::io;
use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = CliError> = std::result::Result<T, E>;

pub const EXIT_USAGE: u8 = 2;
pub const EXIT_DATASET: u8 = 3;
pub const EXIT_IO: u8 = 4;
pub const EXIT_INTERNAL: u8 = 5;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] elastika::Error),

    #[error("usage error: {0}")]
    Usage(String),

    #[error("{}:{line}: {message}", path.display())]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    pub fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit status: 2 usage or parse, 3 dataset gate, 4 I/O, 5 internal.
    pub fn exit_code(&self) -> u8 {
        use elastika::Error as E;
        match self {
            CliError::Core(e) => match e {
                E::Domain(_) | E::Usage(_) | E::LengthMismatch { .. } | E::Parse { .. } => {
                    EXIT_USAGE
                }
                E::VariableLength { .. }
                | E::EmptyDataset(_)
                | E::SingletonClass { .. }
                | E::SeriesTooShort(_) => EXIT_DATASET,
                E::Io { .. } => EXIT_IO,
            },
            CliError::Usage(_) | CliError::Parse { .. } => EXIT_USAGE,
            CliError::Io { .. } => EXIT_IO,
            CliError::Internal(_) => EXIT_INTERNAL,
        }
    }
}
