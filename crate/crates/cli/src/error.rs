use std::io;

use thiserror::Error;

/// Exit codes: 0 success, 1 verification failure, 2 usage error.
pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] spider_core::Error),
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
    #[error("{failed} of {total} checks failed")]
    Failed { failed: usize, total: usize },
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        Self::Usage(msg.into())
    }

    /// Numerical breakdowns count as failed checks; bad input and unwritable
    /// paths are usage errors.
    pub fn exit_code(&self) -> i32 {
        use spider_core::Error as E;
        match self {
            Self::Failed { .. } => EXIT_FAILED,
            Self::Core(E::NonFinite { .. } | E::Quadrature { .. }) => EXIT_FAILED,
            _ => EXIT_USAGE,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
