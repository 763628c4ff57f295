//! Record emission (JSON lines or CSV) and run manifests.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

use crate::args::Format;

/// Records collected by a subcommand, already converted to JSON values so
/// that both output formats render the same fields in the same order.
#[derive(Debug, Default)]
pub struct Records(Vec<Value>);

impl Records {
    pub fn one<T: Serialize>(record: &T) -> Result<Self> {
        Ok(Records(vec![serde_json::to_value(record)?]))
    }

    pub fn many<T: Serialize>(records: &[T]) -> Result<Self> {
        Ok(Records(
            records
                .iter()
                .map(serde_json::to_value)
                .collect::<Result<_, _>>()?,
        ))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn render(&self, format: Format) -> Result<Vec<u8>> {
        match format {
            Format::Json => {
                let mut out = Vec::new();
                for v in &self.0 {
                    serde_json::to_writer(&mut out, v)?;
                    out.push(b'\n');
                }
                Ok(out)
            }
            Format::Csv => self.render_csv(),
        }
    }

    fn render_csv(&self) -> Result<Vec<u8>> {
        let rows: Vec<Vec<(String, String)>> = self.0.iter().map(flatten).collect();
        let mut header: Vec<String> = Vec::new();
        for row in &rows {
            for (k, _) in row {
                if !header.contains(k) {
                    header.push(k.clone());
                }
            }
        }
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&header)?;
        for row in &rows {
            let cells = header.iter().map(|h| {
                row.iter()
                    .find(|(k, _)| k == h)
                    .map(|(_, v)| v.as_str())
                    .unwrap_or("")
            });
            w.write_record(cells)?;
        }
        w.flush()?;
        Ok(w.into_inner().context("flushing CSV buffer")?)
    }
}

/// Flattens a record into `(column, cell)` pairs: nested objects become
/// dotted columns, arrays become `;`-joined cells, null becomes empty.
fn flatten(v: &Value) -> Vec<(String, String)> {
    fn scalar(v: &Value) -> String {
        match v {
            Value::Null => String::new(),
            Value::String(s) => s.clone(),
            Value::Array(xs) => xs.iter().map(scalar).collect::<Vec<_>>().join(";"),
            other => other.to_string(),
        }
    }
    fn go(prefix: &str, map: &Map<String, Value>, out: &mut Vec<(String, String)>) {
        for (k, v) in map {
            let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
            match v {
                Value::Object(inner) => go(&key, inner, out),
                other => out.push((key, scalar(other))),
            }
        }
    }
    let mut out = Vec::new();
    match v {
        Value::Object(map) => go("", map, &mut out),
        other => out.push(("value".into(), scalar(other))),
    }
    out
}

#[derive(Debug, Serialize)]
pub struct RunManifest<'a> {
    pub command: &'a str,
    pub parameters: Value,
    pub toolkit_version: &'a str,
    pub wall_time_seconds: f64,
    pub output: String,
    pub records: usize,
    pub output_sha256: String,
}

pub fn manifest_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".manifest.json");
    PathBuf::from(name)
}

/// Writes the data to `out` (or stdout) and, for files, the manifest.
pub fn emit(
    data: &[u8],
    out: Option<&Path>,
    command: &str,
    parameters: Value,
    records: usize,
    wall_time_seconds: f64,
) -> Result<()> {
    match out {
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(data)?;
            stdout.flush()?;
        }
        Some(path) => {
            fs::write(path, data).with_context(|| format!("writing {}", path.display()))?;
            let manifest = RunManifest {
                command,
                parameters,
                toolkit_version: env!("CARGO_PKG_VERSION"),
                wall_time_seconds,
                output: path.display().to_string(),
                records,
                output_sha256: hex_digest(data),
            };
            let mpath = manifest_path(path);
            let mut text = serde_json::to_vec_pretty(&manifest)?;
            text.push(b'\n');
            fs::write(&mpath, text).with_context(|| format!("writing {}", mpath.display()))?;
        }
    }
    Ok(())
}

pub fn hex_digest(data: &[u8]) -> String {
    Sha256::digest(data).iter().map(|b| format!("{b:02x}")).collect()
}
