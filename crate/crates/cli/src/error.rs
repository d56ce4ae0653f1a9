//! Runner-level errors, grouped by the exit code they map to.

use thiserror::Error;

/// Anything that can abort a run. Exit codes: config 2, data 3, runtime 4.
#[derive(Debug, Error)]
pub enum RunError {
    #[error("config error: {0}")]
    Config(String),

    #[error("data error [{stage}]: {message}")]
    Data { stage: String, message: String },

    #[error("runtime error [{stage}]: {message}")]
    Runtime { stage: String, message: String },
}

impl RunError {
    pub fn config(message: impl Into<String>) -> Self {
        RunError::Config(message.into())
    }

    pub fn data(stage: &str, error: impl std::fmt::Display) -> Self {
        RunError::Data {
            stage: stage.to_string(),
            message: error.to_string(),
        }
    }

    pub fn runtime(stage: &str, error: impl std::fmt::Display) -> Self {
        RunError::Runtime {
            stage: stage.to_string(),
            message: error.to_string(),
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            RunError::Config(_) => 2,
            RunError::Data { .. } => 3,
            RunError::Runtime { .. } => 4,
        }
    }
}
