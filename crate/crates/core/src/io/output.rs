//! JSON and CSV report writers.
//!
//! JSON objects are written with sorted keys so identical runs give
//! byte-identical files.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use crate::error::{Error, Result};

/// Provenance block attached to every JSON report.
#[derive(Debug, Clone, PartialEq, Serialize, Default)]
pub struct Metadata {
    pub crate_version: String,
    pub command: String,
    pub seed: Option<u64>,
    pub xi_policy: Option<String>,
    pub xi_log: Option<f64>,
    pub m: Option<usize>,
    pub extra: BTreeMap<String, Value>,
}

impl Metadata {
    pub fn new(command: &str) -> Self {
        Self { crate_version: env!("CARGO_PKG_VERSION").into(), command: command.into(), ..Default::default() }
    }

    pub fn with(mut self, key: &str, value: impl Serialize) -> Self {
        self.extra.insert(key.into(), serde_json::to_value(value).unwrap_or(Value::Null));
        self
    }
}

/// Pretty JSON with object keys in sorted order and a trailing newline.
pub fn to_sorted_json<S: Serialize + ?Sized>(value: &S) -> Result<String> {
    // serde_json's default map is ordered by key
    let v: Value = serde_json::to_value(value)?;
    let mut s = serde_json::to_string_pretty(&v)?;
    s.push('\n');
    Ok(s)
}

/// Writes `{"metadata": ..., "result": ...}`.
pub fn write_report<S: Serialize + ?Sized>(path: impl AsRef<Path>, result: &S, metadata: &Metadata) -> Result<()> {
    let doc = serde_json::json!({ "metadata": metadata, "result": result });
    std::fs::write(path, to_sorted_json(&doc)?)?;
    Ok(())
}

pub fn write_csv<I, R>(path: impl AsRef<Path>, header: &[&str], rows: I) -> Result<()>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = String>,
{
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(header)?;
    for r in rows {
        w.write_record(r.into_iter().collect::<Vec<_>>())?;
    }
    w.flush()?;
    Ok(())
}

/// Machine-readable failure description.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorRecord {
    pub code: String,
    pub message: String,
}

impl From<&Error> for ErrorRecord {
    fn from(e: &Error) -> Self {
        Self { code: e.code(), message: e.to_string() }
    }
}
