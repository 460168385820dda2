use std::path::PathBuf;

use cheby_core::CoreError;
use thiserror::Error;

/// Exit code for command-line usage errors.
pub const EXIT_USAGE: i32 = 64;
/// Exit code for invalid configuration.
pub const EXIT_CONFIG: i32 = 65;
/// Exit code for I/O failures.
pub const EXIT_IO: i32 = 2;
/// Exit code for numerical failures inside an experiment.
pub const EXIT_FAILURE: i32 = 1;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed image: {0}")]
    Format(String),

    #[error("unsupported image format: {0}")]
    UnsupportedFormat(String),

    #[error(transparent)]
    Core(#[from] CoreError),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Io { .. } => EXIT_IO,
            CliError::Format(_) | CliError::UnsupportedFormat(_) => EXIT_CONFIG,
            CliError::Core(CoreError::InvalidRange { .. }) => EXIT_CONFIG,
            CliError::Core(_) => EXIT_FAILURE,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
