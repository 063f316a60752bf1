use std::path::PathBuf;

use thiserror::Error;

/// Exit code for success.
pub const EXIT_OK: i32 = 0;
/// Exit code for bad invocations, unreadable or invalid configuration.
pub const EXIT_USAGE: i32 = 2;
/// Exit code for numerical failures.
pub const EXIT_NUMERIC: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("config {path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("{field}: {reason}")]
    Invalid { field: String, reason: String },
    #[error("{context}: {source}")]
    Numeric {
        context: String,
        source: tunnelsplit_core::Error,
    },
    #[error("thread pool: {0}")]
    Pool(String),
}

impl CliError {
    pub fn invalid(field: &str, reason: impl Into<String>) -> Self {
        Self::Invalid {
            field: field.to_owned(),
            reason: reason.into(),
        }
    }

    pub fn numeric(context: impl Into<String>, source: tunnelsplit_core::Error) -> Self {
        Self::Numeric {
            context: context.into(),
            source,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Numeric { .. } => EXIT_NUMERIC,
            _ => EXIT_USAGE,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// Attaches a context string to core errors.
pub trait NumericContext<T> {
    fn context(self, context: impl FnOnce() -> String) -> CliResult<T>;
}

impl<T> NumericContext<T> for tunnelsplit_core::Result<T> {
    fn context(self, context: impl FnOnce() -> String) -> CliResult<T> {
        self.map_err(|e| CliError::numeric(context(), e))
    }
}
