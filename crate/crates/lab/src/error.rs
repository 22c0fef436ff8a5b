use std::path::PathBuf;

use teichflow::Error as CoreError;

#[derive(Debug, thiserror::Error)]
pub enum LabError {
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("malformed trace: {0}")]
    MalformedTrace(String),
    #[error("{0}")]
    Usage(String),
}

pub type LabResult<T> = Result<T, LabError>;

/// Process exit codes.
pub mod exit {
    pub const OK: u8 = 0;
    pub const CONFIG: u8 = 1;
    pub const NUMERICAL: u8 = 2;
    pub const INCONCLUSIVE: u8 = 3;
}

impl LabError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> LabError {
        LabError::Io { path: path.into(), source }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            LabError::Core(e) => match e.root() {
                CoreError::ConfigError(_)
                | CoreError::InvalidSlope
                | CoreError::InvalidFoliation
                | CoreError::InvalidMappingClass { .. }
                | CoreError::InvalidFamily(_)
                | CoreError::InvalidPoint
                | CoreError::InvalidBasis { .. }
                | CoreError::AreaError { .. }
                | CoreError::NotRealizable { .. } => exit::CONFIG,
                CoreError::Inconclusive(_) | CoreError::InsufficientData { .. } => exit::INCONCLUSIVE,
                _ => exit::NUMERICAL,
            },
            _ => exit::CONFIG,
        }
    }
}
