use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = CliError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] pwroc_core::Error),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: u64,
        message: String,
    },

    #[error("consistency check failed: {0}")]
    Consistency(String),

    #[error("{0}")]
    Usage(String),

    #[error("benchmark check failed: {0}")]
    Bench(String),
}

impl CliError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    /// Short machine-readable category.
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Core(pwroc_core::Error::Input(_)) => "input",
            CliError::Core(pwroc_core::Error::Parameter(_)) => "parameter",
            CliError::Core(pwroc_core::Error::NoAdmissibleWindow(_)) => "no_admissible_window",
            CliError::Core(pwroc_core::Error::DegenerateClasses { .. }) => "degenerate_classes",
            CliError::Core(_) => "evaluation",
            CliError::Io { .. } => "io",
            CliError::Parse { .. } => "parse",
            CliError::Consistency(_) => "consistency",
            CliError::Usage(_) => "usage",
            CliError::Bench(_) => "bench",
        }
    }
}
