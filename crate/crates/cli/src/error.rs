use std::path::PathBuf;

use thiserror::Error;

/// Failures of the command-line front end, each mapped to an exit code.
#[derive(Debug, Error)]
pub enum AppError {
    #[error("config error: {0}")]
    Config(String),
    #[error("invalid figure {0}; expected 1 to 6")]
    InvalidFigure(u32),
    #[error("{stage} failed: {source}")]
    Numerical {
        stage: String,
        #[source]
        source: lagrem::Error,
    },
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl AppError {
    pub fn numerical(stage: impl Into<String>) -> impl FnOnce(lagrem::Error) -> AppError {
        let stage = stage.into();
        move |source| AppError::Numerical { stage, source }
    }

    /// 2 for configuration and usage problems, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            AppError::Config(_) | AppError::InvalidFigure(_) => 2,
            AppError::Numerical { .. } | AppError::Io { .. } => 1,
        }
    }
}
