use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::Serialize;

use crate::context::CacheStats;
use crate::error::CliError;

/// One verified identity.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub detail: String,
}

impl Check {
    /// Passes when `residual ≤ tolerance` (NaN fails).
    pub fn new(name: impl Into<String>, residual: f64, tolerance: f64, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            residual,
            tolerance,
            pass: residual <= tolerance,
            detail: detail.into(),
        }
    }

    /// A boolean property with no numeric residual.
    pub fn holds(name: impl Into<String>, ok: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            residual: if ok { 0.0 } else { 1.0 },
            tolerance: 0.0,
            pass: ok,
            detail: detail.into(),
        }
    }

    /// The computation behind the check failed.
    pub fn errored(name: impl Into<String>, e: impl std::fmt::Display) -> Self {
        Self {
            name: name.into(),
            residual: f64::INFINITY,
            tolerance: 0.0,
            pass: false,
            detail: format!("error: {e}"),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub level: u64,
    pub config_fingerprint: String,
    pub checks: Vec<Check>,
    pub pass: bool,
}

impl SuiteReport {
    pub fn new(suite: &str, level: u64, fingerprint: String, checks: Vec<Check>) -> Self {
        let pass = !checks.is_empty() && checks.iter().all(|c| c.pass);
        Self {
            suite: suite.to_string(),
            level,
            config_fingerprint: fingerprint,
            checks,
            pass,
        }
    }
}

/// Run facts that vary between otherwise identical runs; kept out of the report.
#[derive(Debug, Clone, Serialize)]
pub struct RunMeta {
    pub suite: String,
    pub wall_seconds: f64,
    pub workers: usize,
    pub psi_cache: CacheStats,
}

impl RunMeta {
    pub fn new(suite: &str, wall: Duration, workers: usize, psi_cache: CacheStats) -> Self {
        Self {
            suite: suite.to_string(),
            wall_seconds: wall.as_secs_f64(),
            workers,
            psi_cache,
        }
    }
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).expect("serializable");
    text.push('\n');
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}

pub fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

pub fn ensure_dir(dir: &Path) -> Result<PathBuf, CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    Ok(dir.to_path_buf())
}
