use std::path::PathBuf;

use cvqkd_core::metrics::MetricsError;
use cvqkd_core::optics::OpticsError;
use cvqkd_core::qknn::QknnError;
use cvqkd_core::secrate::SecrateError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("resource error: {0}")]
    Resource(String),
    #[error("numeric error: {0}")]
    Numeric(String),
    #[error("i/o error at {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    /// Process exit status for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Resource(_) | CliError::Io { .. } => 3,
            CliError::Numeric(_) => 4,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }
}

impl From<QknnError> for CliError {
    fn from(e: QknnError) -> Self {
        match e {
            QknnError::KTooLarge { .. } | QknnError::ZeroK | QknnError::BadRegister(_) => {
                CliError::Config(e.to_string())
            }
            QknnError::Qsim(_) => CliError::Resource(e.to_string()),
            _ => CliError::Numeric(e.to_string()),
        }
    }
}

impl From<OpticsError> for CliError {
    fn from(e: OpticsError) -> Self {
        match e {
            OpticsError::BadConstellation { .. }
            | OpticsError::BadChannel(_)
            | OpticsError::Empty => CliError::Config(e.to_string()),
            _ => CliError::Numeric(e.to_string()),
        }
    }
}

impl From<SecrateError> for CliError {
    fn from(e: SecrateError) -> Self {
        match e {
            SecrateError::BadInput(_) => CliError::Config(e.to_string()),
            _ => CliError::Numeric(e.to_string()),
        }
    }
}

impl From<MetricsError> for CliError {
    fn from(e: MetricsError) -> Self {
        match e {
            MetricsError::BadDelta(_) | MetricsError::NonPositive => {
                CliError::Config(e.to_string())
            }
            _ => CliError::Numeric(e.to_string()),
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
