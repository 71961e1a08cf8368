//! Report persistence: JSON envelopes with a schema version, and fixed-header CSV.
//!
//! Floats are written in Rust's shortest round-trip decimal form, so reading
//! a JSON report back reproduces the in-memory values bit for bit.

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use std::io::Write;
use std::path::Path;

use crate::error::{invalid, Error, Result};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    Csv,
    Json,
}

impl std::str::FromStr for ReportFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            other => Err(invalid(format!("unknown report format '{other}' (csv | json)"))),
        }
    }
}

impl ReportFormat {
    pub fn from_path(p: &Path) -> Option<Self> {
        match p.extension()?.to_str()? {
            "csv" => Some(ReportFormat::Csv),
            "json" => Some(ReportFormat::Json),
            _ => None,
        }
    }
}

/// A report that also has a flat tabular view.
pub trait Tabular {
    /// Name stored in the JSON envelope.
    const KIND: &'static str;
    fn header(&self) -> Vec<String>;
    fn rows(&self) -> Vec<Vec<String>>;
}

#[derive(Serialize)]
struct EnvelopeOut<'a, T> {
    schema_version: u32,
    kind: &'a str,
    #[serde(skip_serializing_if = "<[String]>::is_empty")]
    provenance: &'a [String],
    data: &'a T,
}

#[derive(Deserialize)]
struct EnvelopeIn<T> {
    schema_version: u32,
    kind: String,
    data: T,
}

pub fn fmt_f64(v: f64) -> String {
    format!("{v}")
}

pub fn to_json<T: Serialize + Tabular>(value: &T, provenance: &[String]) -> Result<String> {
    let env = EnvelopeOut { schema_version: SCHEMA_VERSION, kind: T::KIND, provenance, data: value };
    let mut s = serde_json::to_string_pretty(&env)?;
    s.push('\n');
    Ok(s)
}

/// CSV text; `provenance` lines are emitted first as `# ` comments.
pub fn to_csv<T: Tabular>(value: &T, provenance: &[String]) -> Result<String> {
    let mut out = Vec::new();
    for p in provenance {
        writeln!(out, "# {p}").expect("write to Vec");
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record(value.header()).map_err(|e| Error::Data(e.to_string()))?;
    for r in value.rows() {
        w.write_record(r).map_err(|e| Error::Data(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Data(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("UTF-8 CSV"))
}

pub fn write_report<T: Serialize + Tabular>(value: &T, format: ReportFormat, path: &Path) -> Result<()> {
    write_report_with(value, format, path, &[])
}

/// Like [`write_report`], with provenance lines: `# ` comments in CSV, a
/// `provenance` array in JSON.
pub fn write_report_with<T: Serialize + Tabular>(
    value: &T,
    format: ReportFormat,
    path: &Path,
    provenance: &[String],
) -> Result<()> {
    let text = match format {
        ReportFormat::Json => to_json(value, provenance)?,
        ReportFormat::Csv => to_csv(value, provenance)?,
    };
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Reads a JSON report written by [`write_report`].
pub fn read_report<T: DeserializeOwned + Tabular>(path: &Path) -> Result<T> {
    let s = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let env: EnvelopeIn<T> = serde_json::from_str(&s)?;
    if env.schema_version != SCHEMA_VERSION {
        return Err(Error::Data(format!(
            "{}: schema_version {} is not supported (expected {SCHEMA_VERSION})",
            path.display(),
            env.schema_version
        )));
    }
    if env.kind != T::KIND {
        return Err(Error::Data(format!("{}: holds a '{}' report, expected '{}'", path.display(), env.kind, T::KIND)));
    }
    Ok(env.data)
}
