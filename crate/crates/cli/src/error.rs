use std::io;
use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    #[error(transparent)]
    Core(#[from] cfml_core::Error),

    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    /// `1` for invalid input or configuration, `2` for failures while running.
    pub fn exit_code(&self) -> i32 {
        use cfml_core::Error as E;
        match self {
            CliError::Config(_) => 1,
            CliError::Core(
                E::Usage(_)
                | E::Validation(_)
                | E::Parse { .. }
                | E::Alignment(_)
                | E::InvalidPerformance(_),
            ) => 1,
            CliError::Io { .. } | CliError::Core(_) | CliError::Runtime(_) => 2,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
