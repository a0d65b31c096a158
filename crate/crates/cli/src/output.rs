//! CSV and JSON artifacts.

use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

use crate::config::Loaded;
use crate::error::CliError;

/// 17 significant digits, enough to round-trip any `f64`.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

pub struct CsvOut {
    writer: csv::Writer<File>,
    width: usize,
}

impl CsvOut {
    pub fn create(path: &Path, comment: Option<&str>, columns: &[&str]) -> Result<Self, CliError> {
        let mut file = File::create(path)?;
        if let Some(c) = comment {
            writeln!(file, "{c}")?;
        }
        let mut writer = csv::Writer::from_writer(file);
        writer.write_record(columns)?;
        Ok(CsvOut {
            writer,
            width: columns.len(),
        })
    }

    pub fn row(&mut self, values: &[f64]) -> Result<(), CliError> {
        self.row_mixed(&[], values)
    }

    /// Leading integer or label columns followed by floats.
    pub fn row_mixed(&mut self, labels: &[String], values: &[f64]) -> Result<(), CliError> {
        debug_assert_eq!(labels.len() + values.len(), self.width);
        let rec = labels.iter().cloned().chain(values.iter().map(|&v| fmt_f64(v)));
        self.writer.write_record(rec)?;
        Ok(())
    }

    pub fn finish(mut self) -> Result<(), CliError> {
        self.writer.flush()?;
        Ok(())
    }
}

pub fn config_hash(raw: &[u8]) -> String {
    format!("{:x}", Sha256::digest(raw))
}

#[derive(Debug, Serialize)]
struct ReportBody<'a> {
    command: &'a str,
    version: &'a str,
    config_hash: String,
    config: Value,
    status: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    message: Option<&'a str>,
    values: &'a Map<String, Value>,
    residuals: &'a Map<String, Value>,
    artifacts: &'a [String],
    runtime_seconds: f64,
}

/// Collects named values and residuals for the JSON report of one run.
pub struct Report {
    command: String,
    started: Instant,
    pub values: Map<String, Value>,
    pub residuals: Map<String, Value>,
    artifacts: Vec<String>,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Report {
            command: command.to_string(),
            started: Instant::now(),
            values: Map::new(),
            residuals: Map::new(),
            artifacts: Vec::new(),
        }
    }

    pub fn value(&mut self, key: &str, v: impl Serialize) {
        self.values.insert(key.into(), serde_json::to_value(v).unwrap_or(Value::Null));
    }

    pub fn residual(&mut self, key: &str, v: impl Serialize) {
        self.residuals.insert(key.into(), serde_json::to_value(v).unwrap_or(Value::Null));
    }

    /// Path of a data file in `dir`, recorded in the report.
    pub fn artifact(&mut self, dir: &Path, name: &str) -> PathBuf {
        self.artifacts.push(name.to_string());
        dir.join(name)
    }

    pub fn write(&self, dir: &Path, loaded: &Loaded, error: Option<&CliError>) -> Result<PathBuf, CliError> {
        let status = match error {
            None => "ok",
            Some(e) if e.exit_code() == 3 => "numerical-failure",
            Some(_) => "invalid",
        };
        let message = error.map(|e| e.to_string());
        let body = ReportBody {
            command: &self.command,
            version: env!("CARGO_PKG_VERSION"),
            config_hash: config_hash(&loaded.raw),
            config: serde_json::to_value(&loaded.config).unwrap_or(Value::Null),
            status,
            message: message.as_deref(),
            values: &self.values,
            residuals: &self.residuals,
            artifacts: &self.artifacts,
            runtime_seconds: self.started.elapsed().as_secs_f64(),
        };
        let path = dir.join(format!("{}.json", self.command));
        let text = serde_json::to_string_pretty(&body).map_err(|e| CliError::Validation(e.to_string()))?;
        std::fs::write(&path, text + "\n")?;
        Ok(path)
    }
}
