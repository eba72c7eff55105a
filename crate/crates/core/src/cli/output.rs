use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::RunConfig;
use crate::{Error, Result};

/// Bumped whenever a column is added, removed or changes meaning.
pub const SCHEMA_VERSION: u32 = 1;

/// One CSV table held in memory before it is written.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub summary: toml::Table,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Table {
            name: name.to_string(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            summary: toml::Table::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len(), "row width of {}", self.name);
        self.rows.push(row);
    }

    /// Values of a column parsed back as numbers (`NaN` for blanks).
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(
            self.rows
                .iter()
                .map(|r| r[i].parse().unwrap_or(f64::NAN))
                .collect(),
        )
    }

    pub fn note(&mut self, key: &str, value: impl Into<toml::Value>) {
        self.summary.insert(key.to_string(), value.into());
    }
}

/// Shortest round-trip representation; blanks for missing values.
pub fn num(x: f64) -> String {
    if x.is_finite() {
        format!("{x}")
    } else {
        String::new()
    }
}

pub fn opt(x: Option<f64>) -> String {
    x.map_or_else(String::new, num)
}

#[derive(Serialize)]
struct Sidecar<'a> {
    artifact: &'static str,
    version: &'static str,
    schema_version: u32,
    command: &'a str,
    file: String,
    columns: &'a [String],
    summary: &'a toml::Table,
    config: &'a RunConfig,
}

/// Writes `<dir>/<name>.csv` and `<dir>/<name>.meta.toml`; returns the
/// CSV path.
pub fn write_table(dir: &Path, command: &str, table: &Table, config: &RunConfig) -> Result<PathBuf> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let csv_path = dir.join(format!("{}.csv", table.name));
    let mut writer = csv::Writer::from_path(&csv_path).map_err(|e| csv_error(&csv_path, e))?;
    writer.write_record(&table.columns).map_err(|e| csv_error(&csv_path, e))?;
    for row in &table.rows {
        writer.write_record(row).map_err(|e| csv_error(&csv_path, e))?;
    }
    writer.flush().map_err(|e| Error::io(&csv_path, e))?;

    let meta = Sidecar {
        artifact: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        schema_version: SCHEMA_VERSION,
        command,
        file: format!("{}.csv", table.name),
        columns: &table.columns,
        summary: &table.summary,
        config,
    };
    let meta_path = dir.join(format!("{}.meta.toml", table.name));
    let text = toml::to_string(&meta).map_err(|e| Error::Serialization(e.to_string()))?;
    fs::write(&meta_path, text).map_err(|e| Error::io(&meta_path, e))?;
    Ok(csv_path)
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::Serialization(format!("{}: {other:?}", path.display())),
    }
}
