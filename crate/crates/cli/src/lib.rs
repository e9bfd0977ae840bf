//! File formats, configuration and the run driver behind the `pwf` binary.

pub mod commands;
pub mod config;
pub mod driver;
pub mod export;
pub mod init;
pub mod manifest;
pub mod records;
pub mod snapshot;

use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] pwf_core::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("config: {0}")]
    Config(String),
    #[error("bad parameters: {0}")]
    BadParameters(String),
    #[error("input is not conformal (defect {defect:e} > 1e-3)")]
    NonConformalInput { defect: f64 },
    #[error("obj export needs an immersion into R^3, got R^{m}")]
    UnsupportedAmbientDim { m: usize },
    /// A check or run that completed but tripped a numerical guard.
    #[error("{0}")]
    Guard(String),
}

impl CliError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Self::Io {
            path: path.into(),
            source,
        }
    }

    /// `1` for mathematical failures, `2` for anything the user has to fix.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Core(pwf_core::Error::BadParameters(_)) => 2,
            Self::Core(_) | Self::NonConformalInput { .. } | Self::Guard(_) => 1,
            Self::Io { .. }
            | Self::Config(_)
            | Self::BadParameters(_)
            | Self::UnsupportedAmbientDim { .. } => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
