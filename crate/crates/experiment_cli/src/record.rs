//! Run records and artifact writing.

use serde::{Deserialize, Serialize};
use std::io::Write;
use std::path::Path;

use crate::CliError;

/// Bumped whenever artifact layouts change.
pub const ARTIFACT_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub name: String,
    pub passed: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(default)]
    pub detail: String,
}

impl Verdict {
    pub fn flag(name: &str, passed: bool, detail: impl Into<String>) -> Self {
        Self { name: name.into(), passed, value: None, tolerance: None, detail: detail.into() }
    }

    /// Passes iff `value < tolerance`.
    pub fn below(name: &str, value: f64, tolerance: f64) -> Self {
        Self { name: name.into(), passed: value < tolerance, value: Some(value), tolerance: Some(tolerance), detail: String::new() }
    }

    /// Passes iff `value <= tolerance`.
    pub fn at_most(name: &str, value: f64, tolerance: f64) -> Self {
        Self { name: name.into(), passed: value <= tolerance, value: Some(value), tolerance: Some(tolerance), detail: String::new() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub kind: String,
    pub config_hash: String,
    pub artifact_version: u32,
    pub crate_version: String,
    pub seed: u64,
    pub started_unix: f64,
    pub finished_unix: f64,
    /// Experiment result; a pure function of the config and seed.
    pub payload: serde_json::Value,
    pub verdicts: Vec<Verdict>,
    pub passed: bool,
    /// Module-level failures and notes.
    pub diagnostics: Vec<String>,
    pub artifacts: Vec<String>,
}

impl RunRecord {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("records serialize")
    }

    pub fn from_json(s: &str) -> Result<Self, CliError> {
        serde_json::from_str(s).map_err(|e| CliError::Io(format!("bad run record: {e}")))
    }
}

pub fn now_unix() -> f64 {
    std::time::SystemTime::now().duration_since(std::time::UNIX_EPOCH).map(|d| d.as_secs_f64()).unwrap_or(0.0)
}

/// Write-temp-then-rename inside the destination directory.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<(), CliError> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    tmp.write_all(contents).map_err(|e| CliError::Io(e.to_string()))?;
    tmp.persist(path).map_err(|e| CliError::Io(format!("{}: {}", path.display(), e.error)))?;
    Ok(())
}

/// CSV with a header row; numbers carry 17 significant digits.
pub fn csv(header: &[&str], rows: &[Vec<f64>]) -> String {
    let mut s = header.join(",");
    s.push('\n');
    for r in rows {
        let cells: Vec<String> = r.iter().map(|x| format!("{x:.16e}")).collect();
        s.push_str(&cells.join(","));
        s.push('\n');
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_keeps_full_precision() {
        let s = csv(&["a", "b"], &[vec![0.1, 1.0 / 3.0]]);
        let line = s.lines().nth(1).unwrap();
        let back: Vec<f64> = line.split(',').map(|x| x.parse().unwrap()).collect();
        assert_eq!(back, vec![0.1, 1.0 / 3.0]);
    }

    #[test]
    fn atomic_write_replaces_contents() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("sub/record.json");
        write_atomic(&p, b"one").unwrap();
        write_atomic(&p, b"two").unwrap();
        assert_eq!(std::fs::read_to_string(&p).unwrap(), "two");
        assert_eq!(std::fs::read_dir(p.parent().unwrap()).unwrap().count(), 1);
    }
}
