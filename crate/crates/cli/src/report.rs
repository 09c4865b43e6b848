//! Output documents: pretty JSON with a `timestamp` field (excluded from
//! reproducibility comparisons) written to `--out` or stdout.

use std::io::Write;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;

use crate::CliError;

#[derive(Serialize)]
pub struct Stamped<T: Serialize> {
    pub timestamp: u64,
    #[serde(flatten)]
    pub body: T,
}

pub fn stamp<T: Serialize>(body: T) -> Stamped<T> {
    let timestamp = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    Stamped { timestamp, body }
}

/// Serializes to pretty JSON with a trailing newline.
pub fn to_json_doc<T: Serialize>(value: &T) -> Result<String, CliError> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Usage(format!("serializing output: {e}")))?;
    text.push('\n');
    Ok(text)
}

pub fn write_out(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => {
            if let Some(dir) = path.parent() {
                if !dir.as_os_str().is_empty() {
                    std::fs::create_dir_all(dir)
                        .map_err(|e| CliError::io(&format!("creating {}", dir.display()), e))?;
                }
            }
            std::fs::write(path, text)
                .map_err(|e| CliError::io(&format!("writing {}", path.display()), e))
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .map_err(|e| CliError::io("writing stdout", e))
        }
    }
}

pub fn write_json<T: Serialize>(out: Option<&Path>, value: &T) -> Result<(), CliError> {
    write_out(out, &to_json_doc(value)?)
}

/// The machine-readable failure document emitted before exiting 2.
#[derive(Serialize)]
pub struct FailureDoc {
    pub error: String,
    pub stage: String,
}
