use std::path::{Path, PathBuf};

use dihedral_core::Error as CoreError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] CoreError),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("cannot encode result document: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io { path: path.to_path_buf(), source }
    }

    pub fn missing(flag: &str) -> Self {
        CliError::Config(format!("`--{flag}` is required"))
    }

    /// 0 success, 1 I/O, 2 validation, 3 data parse, 4 numeric divergence.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Io { .. } | CliError::Json(_) => 1,
            CliError::Core(e) => match e {
                CoreError::Io(_) => 1,
                CoreError::Divergence { .. } => 4,
                CoreError::Parse { .. }
                | CoreError::NonFiniteCoordinate { .. }
                | CoreError::NonFiniteSample { .. }
                | CoreError::SeriesTooShort { .. }
                | CoreError::LengthMismatch { .. }
                | CoreError::DegeneratePhase { .. }
                | CoreError::EmptyCloud => 3,
                _ => 2,
            },
        }
    }
}
