use std::process::ExitCode;

use hermite_core::Error as CoreError;

/// Stable exit codes of the `hermite` binary.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exit {
    Pass = 0,
    /// A check or a precondition failed.
    Failure = 1,
    /// Bad arguments or unreadable input.
    Usage = 2,
    /// A numeric operation could not be completed.
    Numeric = 3,
}

impl From<Exit> for ExitCode {
    fn from(e: Exit) -> Self {
        ExitCode::from(e as u8)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("cannot read {path}: {source}")]
    Read {
        path: String,
        source: std::io::Error,
    },
    #[error("cannot write {path}: {source}")]
    Write {
        path: String,
        source: std::io::Error,
    },
    #[error("malformed mask file {path}: {reason}")]
    MaskFile { path: String, reason: String },
    #[error("csv output: {0}")]
    Csv(#[from] csv::Error),
    #[error("json output: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Core(#[from] CoreError),
}

impl CliError {
    pub fn exit(&self) -> Exit {
        match self {
            CliError::Usage(_) | CliError::Read { .. } | CliError::MaskFile { .. } => Exit::Usage,
            CliError::Write { .. } | CliError::Csv(_) | CliError::Json(_) => Exit::Numeric,
            CliError::Core(e) => match e {
                CoreError::DuplicateFrequency(_)
                | CoreError::InvalidSpace(_)
                | CoreError::DimensionMismatch { .. }
                | CoreError::Unsupported(_)
                | CoreError::WindowTooSmall { .. } => Exit::Usage,
                CoreError::NotAnnihilator { .. }
                | CoreError::SpectralConditionFailed { .. }
                | CoreError::WindowExhausted { .. } => Exit::Failure,
                _ => Exit::Numeric,
            },
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
