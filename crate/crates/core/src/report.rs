//! Run reports and deterministic output files.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::verify::CriterionResult;

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Pretty JSON with object keys in sorted order.
pub fn to_sorted_json<T: Serialize>(value: &T) -> Result<String> {
    // serde_json's map is ordered by key unless `preserve_order` is on
    let v = serde_json::to_value(value).map_err(|e| Error::Config(e.to_string()))?;
    let mut s = serde_json::to_string_pretty(&v).map_err(|e| Error::Config(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OutputFile {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub command: String,
    pub inputs_digest: String,
    pub outputs_digest: String,
    pub outputs: Vec<OutputFile>,
    pub wall_time_seconds: f64,
    pub timestamp_unix: u64,
    pub checks: Vec<CheckResult>,
    /// Failed checks; empty exactly when the run passed.
    pub failures: Vec<String>,
    pub passed: bool,
}

/// Accumulates output files and checks of one command.
#[derive(Debug)]
pub struct Run {
    command: String,
    inputs: String,
    outputs: Vec<(PathBuf, String)>,
    checks: Vec<CheckResult>,
    failures: Vec<String>,
    start: std::time::Instant,
}

impl Run {
    pub fn new(command: &str, inputs: String) -> Self {
        Run {
            command: command.to_string(),
            inputs,
            outputs: Vec::new(),
            checks: Vec::new(),
            failures: Vec::new(),
            start: std::time::Instant::now(),
        }
    }

    pub fn write(&mut self, path: &Path, bytes: &[u8]) -> Result<()> {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir).map_err(|e| io_error(dir, e))?;
        }
        fs::write(path, bytes).map_err(|e| io_error(path, e))?;
        self.outputs.push((path.to_path_buf(), sha256_hex(bytes)));
        Ok(())
    }

    pub fn check(&mut self, name: impl Into<String>, passed: bool) {
        let name = name.into();
        if !passed {
            self.failures.push(name.clone());
        }
        self.checks.push(CheckResult { name, passed });
    }

    pub fn criterion(&mut self, c: &CriterionResult) {
        self.checks.push(CheckResult {
            name: format!("criterion {}: {}", c.id, c.name),
            passed: c.passed,
        });
        for f in &c.failures {
            self.failures.push(format!("criterion {}: {f}", c.id));
        }
        if !c.passed && c.failures.is_empty() {
            self.failures.push(format!("criterion {}", c.id));
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn finish(self) -> RunReport {
        let joined: String = self.outputs.iter().map(|(_, d)| d.as_str()).collect::<Vec<_>>().join("\n");
        RunReport {
            command: self.command,
            inputs_digest: sha256_hex(self.inputs.as_bytes()),
            outputs_digest: sha256_hex(joined.as_bytes()),
            outputs: self
                .outputs
                .iter()
                .map(|(p, d)| OutputFile {
                    path: p.display().to_string(),
                    sha256: d.clone(),
                })
                .collect(),
            wall_time_seconds: self.start.elapsed().as_secs_f64(),
            timestamp_unix: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map_or(0, |d| d.as_secs()),
            passed: self.failures.is_empty(),
            checks: self.checks,
            failures: self.failures,
        }
    }
}

pub fn io_error(path: &Path, e: std::io::Error) -> Error {
    Error::Config(format!("{}: {e}", path.display()))
}
