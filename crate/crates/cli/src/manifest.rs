use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::{CliError, Result};

/// Written last, next to the artifacts it lists.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub code_version: String,
    /// Seconds since the Unix epoch.
    pub start_time: f64,
    pub end_time: f64,
    pub status: String,
    pub message: Option<String>,
    pub steps: usize,
    pub final_t: f64,
    pub reprojection_failures: usize,
    /// Paths relative to the output directory.
    pub artifacts: Vec<PathBuf>,
    pub config: RunConfig,
}

impl RunManifest {
    pub fn write(&self, path: &Path) -> Result<()> {
        let text = toml::to_string(self).map_err(|e| CliError::Config(e.to_string()))?;
        std::fs::write(path, text).map_err(|e| CliError::io(path, e))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        toml::from_str(&text).map_err(|e| CliError::Config(e.to_string()))
    }
}

pub fn now() -> f64 {
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs_f64())
        .unwrap_or(0.0)
}
