//! Output files: CSV with full-precision floats, JSON, and a run manifest
//! written next to each output.

use crate::error::Result;
use serde::Serialize;
use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Marker written as the last CSV row when a run stops on a failure.
pub const FAILURE_MARKER: &str = "# FAILED";

#[derive(Clone, Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub parameters: BTreeMap<String, serde_json::Value>,
    pub tool_version: &'static str,
    pub started: String,
    pub finished: String,
    pub outputs: Vec<PathBuf>,
    pub calibration_constants: BTreeMap<String, f64>,
    pub status: String,
}

impl RunManifest {
    pub fn new(command: &str) -> Self {
        RunManifest {
            command: command.to_string(),
            parameters: BTreeMap::new(),
            tool_version: TOOL_VERSION,
            started: now(),
            finished: String::new(),
            outputs: Vec::new(),
            calibration_constants: BTreeMap::new(),
            status: "running".into(),
        }
    }

    pub fn param(&mut self, key: &str, value: impl Serialize) {
        let v = serde_json::to_value(value).unwrap_or(serde_json::Value::Null);
        self.parameters.insert(key.to_string(), v);
    }

    /// Stamp the finish time and write `<output>.manifest.json` for every output.
    pub fn finish(&mut self, status: &str) -> Result<()> {
        self.finished = now();
        self.status = status.to_string();
        let text = serde_json::to_string_pretty(self)?;
        for out in &self.outputs {
            std::fs::write(manifest_path(out), &text)?;
        }
        Ok(())
    }
}

pub fn manifest_path(output: &Path) -> PathBuf {
    let mut s = output.as_os_str().to_owned();
    s.push(".manifest.json");
    PathBuf::from(s)
}

fn now() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true)
}

/// Row-at-a-time CSV writer that flushes after every row.
pub struct CsvSink {
    out: BufWriter<File>,
}

impl CsvSink {
    pub fn create(path: &Path, header: &str) -> Result<Self> {
        if let Some(dir) = path.parent() {
            if !dir.as_os_str().is_empty() {
                std::fs::create_dir_all(dir)?;
            }
        }
        let mut sink = CsvSink {
            out: BufWriter::new(File::create(path)?),
        };
        sink.row(header)?;
        Ok(sink)
    }

    pub fn row(&mut self, line: &str) -> Result<()> {
        writeln!(self.out, "{line}")?;
        self.out.flush()?;
        Ok(())
    }

    pub fn fail(&mut self, reason: &str) -> Result<()> {
        let reason = reason.replace(['\n', '\r'], " ");
        self.row(&format!("{FAILURE_MARKER}: {reason}"))
    }
}

pub fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir)?;
        }
    }
    std::fs::write(path, serde_json::to_string_pretty(value)?)?;
    Ok(())
}

/// `{:.16e}`, enough digits to round-trip an `f64`.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}
