//! Optional JSON config file. Flags beat config values, config values beat
//! defaults.

use std::path::Path;

use serde::Deserialize;

use crate::CliError;

#[derive(Clone, Debug, Default, Deserialize)]
pub struct FileConfig {
    pub seed: Option<u64>,
    pub n: Option<usize>,
    pub s: Option<usize>,
    pub d: Option<usize>,
    pub m1: Option<usize>,
    pub m: Option<usize>,
    pub eps: Option<f64>,
    pub nu: Option<f64>,
    pub trials: Option<usize>,
    pub jobs: Option<usize>,
    pub kind: Option<String>,
    pub condition: Option<String>,
    pub mode: Option<String>,
    /// Sample-scale grid for the error sweep.
    pub grid: Option<Vec<f64>>,
    /// Dimension grid for the runtime sweep.
    pub n_grid: Option<Vec<usize>>,
    pub delta_t: Option<u32>,
    pub zipcodes: Option<Vec<String>>,
    /// Window indices to build; all nonempty windows when absent.
    pub windows: Option<Vec<u64>>,
    pub ambient_windows: Option<u32>,
    pub synth: Option<boolsketch::ingest::SynthParams>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(FileConfig::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::io(&format!("reading config {}", path.display()), e))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))
    }
}

/// `flag.or(config).unwrap_or(default)`.
pub fn pick<T: Clone>(flag: Option<T>, config: Option<T>, default: T) -> T {
    flag.or(config).unwrap_or(default)
}

/// Required value with no default.
pub fn pick_required<T: Clone>(
    flag: Option<T>,
    config: Option<T>,
    what: &str,
) -> Result<T, CliError> {
    flag.or(config)
        .ok_or_else(|| CliError::Usage(format!("{what} is required (flag or config)")))
}
