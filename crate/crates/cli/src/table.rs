//! Sweep tables and their CSV/JSON serialization.
//!
//! Numbers are rounded to nine significant digits before they are written,
//! so both formats carry the same values. CSV output starts with `# key: value`
//! metadata lines, followed by an RFC 4180 header and rows (LF endings).
//! Units appear only in the JSON column list; column names carry a unit suffix.

use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::CliError;

pub const SIGNIFICANT_DIGITS: usize = 9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Column {
    pub name: String,
    pub unit: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Cell {
    Number(f64),
    Text(String),
    Missing,
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Number(round_significant(x))
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl From<Option<f64>> for Cell {
    fn from(x: Option<f64>) -> Self {
        x.map_or(Cell::Missing, Cell::from)
    }
}

impl Cell {
    fn to_field(&self) -> String {
        match self {
            Cell::Number(x) => format_number(*x),
            Cell::Text(s) => s.clone(),
            Cell::Missing => String::new(),
        }
    }
}

/// Rounds to [`SIGNIFICANT_DIGITS`] significant digits.
pub fn round_significant(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x).parse().expect("formatted float parses")
}

/// Shortest form of the rounded value; exponent notation outside [1e-4, 1e16).
pub fn format_number(x: f64) -> String {
    let r = round_significant(x);
    if r == 0.0 {
        return "0".into();
    }
    if r.is_finite() && (r.abs() < 1e-4 || r.abs() >= 1e16) {
        format!("{r:e}")
    } else {
        format!("{r}")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub columns: Vec<Column>,
    pub rows: Vec<Vec<Cell>>,
    pub metadata: BTreeMap<String, Value>,
}

impl SweepTable {
    pub fn new(columns: &[(&str, &str)]) -> Self {
        let mut metadata = BTreeMap::new();
        metadata.insert("tool".into(), Value::from(env!("CARGO_PKG_NAME")));
        metadata.insert("version".into(), Value::from(env!("CARGO_PKG_VERSION")));
        SweepTable {
            columns: columns.iter().map(|&(name, unit)| Column { name: name.into(), unit: unit.into() }).collect(),
            rows: Vec::new(),
            metadata,
        }
    }

    pub fn meta(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.metadata.insert(key.into(), value.into());
        self
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn write(&self, format: Format, out: &mut dyn Write) -> Result<(), CliError> {
        match format {
            Format::Csv => self.write_csv(out),
            Format::Json => {
                serde_json::to_writer_pretty(&mut *out, self)?;
                out.write_all(b"\n")?;
                Ok(())
            }
        }
    }

    fn write_csv(&self, out: &mut dyn Write) -> Result<(), CliError> {
        for (key, value) in &self.metadata {
            let text = match value {
                Value::String(s) => s.clone(),
                other => other.to_string(),
            };
            writeln!(out, "# {key}: {text}")?;
        }
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
        w.write_record(self.columns.iter().map(|c| c.name.as_str()))?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::to_field))?;
        }
        w.flush()?;
        Ok(())
    }
}
