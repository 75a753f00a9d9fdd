//! CSV tables with a manifest header, and JSON snapshots.
//!
//! Every CSV starts with two comment lines:
//!
//! ```text
//! # wqed <version> <command>
//! # manifest: {"tool":"wqed",...}
//! ```
//!
//! followed by a header row and data rows. Numbers use scientific notation
//! with 17 significant digits, so every `f64` survives a round trip; missing
//! values are written as `NaN`.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::config::{Numerics, RunConfig};
use crate::error::CliError;

pub const MANIFEST_PREFIX: &str = "# manifest: ";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    /// Arguments after the program name.
    pub args: Vec<String>,
    pub config: RunConfig,
    pub numerics: Numerics,
    pub sweep: Option<String>,
    pub wall_time_s: f64,
    /// Largest error estimate of each reported kind.
    pub errors: BTreeMap<String, f64>,
}

impl Manifest {
    pub fn new(command: &str, args: Vec<String>, config: RunConfig, numerics: Numerics) -> Self {
        Self {
            tool: "wqed".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            args,
            config,
            numerics,
            sweep: None,
            wall_time_s: 0.0,
            errors: BTreeMap::new(),
        }
    }

    /// Records `value` under `name`, keeping the largest finite one.
    pub fn note_error(&mut self, name: &str, value: f64) {
        if value.is_finite() {
            let slot = self.errors.entry(name.into()).or_insert(value);
            *slot = slot.max(value);
        }
    }

    pub fn header(&self) -> Result<String, CliError> {
        Ok(format!(
            "# {} {} {}\n{}{}\n",
            self.tool,
            self.version,
            self.command,
            MANIFEST_PREFIX,
            serde_json::to_string(self)?
        ))
    }

    /// Finds the manifest line in a CSV stream.
    pub fn read(reader: impl BufRead) -> Result<Self, CliError> {
        for line in reader.lines() {
            let line = line?;
            if let Some(json) = line.strip_prefix(MANIFEST_PREFIX) {
                return Ok(serde_json::from_str(json)?);
            }
            if !line.starts_with('#') {
                break;
            }
        }
        Err(CliError::Param("no manifest header found".into()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        Cell::Num(v.unwrap_or(f64::NAN))
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.into())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

pub fn format_number(v: f64) -> String {
    if v.is_nan() {
        "NaN".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{v:.16e}")
    }
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Num(v) => format_number(*v),
            Cell::Text(s) => s.clone(),
        }
    }
}

/// A named CSV dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Self {
            name: name.into(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn with_columns(name: &str, columns: Vec<String>) -> Self {
        Self {
            name: name.into(),
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len(), "row width of {}", self.name);
        self.rows.push(row);
    }

    pub fn write(&self, manifest: &Manifest, mut out: impl Write) -> Result<(), CliError> {
        out.write_all(manifest.header()?.as_bytes())?;
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render))?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Reads the data part of a CSV written by [`Table::write`].
#[cfg(test)]
pub fn read_table(text: &str) -> Result<(Vec<String>, Vec<Vec<String>>), CliError> {
    let mut r = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let columns = r.headers()?.iter().map(String::from).collect();
    let mut rows = Vec::new();
    for rec in r.records() {
        rows.push(rec?.iter().map(String::from).collect());
    }
    Ok((columns, rows))
}
