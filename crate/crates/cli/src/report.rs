//! Tabular reports and their CSV/JSON renderings.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use crate::args::Format;
use crate::error::CliError;

/// Bumped whenever a column set or JSON layout changes.
pub const SCHEMA_VERSION: u32 = 1;

pub struct Report {
    /// Base file name used under `HOAA_OUTPUT_DIR`.
    pub name: String,
    pub command: &'static str,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
    /// Extra JSON members next to the rows.
    pub extra: Value,
}

impl Report {
    pub fn new(name: impl Into<String>, command: &'static str, columns: &[&str]) -> Self {
        Report {
            name: name.into(),
            command,
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            extra: json!({}),
        }
    }

    pub fn render(&self, format: Format) -> Result<Vec<u8>, CliError> {
        match format {
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(&self.columns).map_err(CliError::render)?;
                for row in &self.rows {
                    w.write_record(row).map_err(CliError::render)?;
                }
                w.into_inner().map_err(|e| CliError::render(e.into_error()))
            }
            Format::Json => {
                let rows: Vec<Value> = self
                    .rows
                    .iter()
                    .map(|row| {
                        Value::Object(
                            self.columns.iter().zip(row).map(|(c, v)| (c.clone(), typed(v))).collect(),
                        )
                    })
                    .collect();
                let mut doc = json!({
                    "schema_version": SCHEMA_VERSION,
                    "command": self.command,
                    "columns": self.columns,
                    "rows": rows,
                });
                if let (Value::Object(doc), Value::Object(extra)) = (&mut doc, &self.extra) {
                    doc.extend(extra.clone());
                }
                let mut out = serde_json::to_vec_pretty(&doc).map_err(CliError::render)?;
                out.push(b'\n');
                Ok(out)
            }
        }
    }
}

/// Numbers and booleans keep their JSON type; everything else is a string.
fn typed(field: &str) -> Value {
    if field.is_empty() {
        return Value::Null;
    }
    if let Ok(v) = field.parse::<i64>() {
        return v.into();
    }
    if let Ok(v) = field.parse::<u64>() {
        return v.into();
    }
    if let Ok(v) = field.parse::<f64>() {
        if v.is_finite() {
            return v.into();
        }
    }
    match field {
        "true" => true.into(),
        "false" => false.into(),
        _ => field.into(),
    }
}

/// Where a report goes: explicit path, the output directory, or stdout.
pub fn destination(explicit: Option<&Path>, dir: Option<&Path>, name: &str, format: Format) -> Option<PathBuf> {
    explicit
        .map(Path::to_path_buf)
        .or_else(|| dir.map(|d| d.join(format!("{name}.{}", format.extension()))))
}

pub fn emit(bytes: &[u8], dest: Option<&Path>) -> Result<(), CliError> {
    match dest {
        Some(path) => fs::write(path, bytes).map_err(|source| CliError::Io { path: path.to_path_buf(), source }),
        None => {
            let mut out = io::stdout().lock();
            out.write_all(bytes)
                .and_then(|_| out.flush())
                .map_err(|source| CliError::Io { path: PathBuf::from("<stdout>"), source })
        }
    }
}
