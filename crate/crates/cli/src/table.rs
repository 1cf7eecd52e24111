//! Result tables rendered as CSV or as a JSON array of records.

use clap::ValueEnum;
use serde_json::{Map, Number, Value};

use crate::error::CliError;

pub const SCHEMA_VERSION: u64 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Text(String),
    Int(u64),
    /// Preformatted real number.
    Real(String),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Text(s) | Cell::Real(s) => s.clone(),
            Cell::Int(v) => v.to_string(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Text(s) => Value::String(s.clone()),
            Cell::Int(v) => Value::Number((*v).into()),
            Cell::Real(s) => s
                .parse::<f64>()
                .ok()
                .and_then(Number::from_f64)
                .map(Value::Number)
                .unwrap_or_else(|| Value::String(s.clone())),
        }
    }
}

pub fn text(s: impl Into<String>) -> Cell {
    Cell::Text(s.into())
}

pub fn int(v: impl Into<u64>) -> Cell {
    Cell::Int(v.into())
}

/// Decibels with four decimals.
pub fn db(x: f64) -> Cell {
    Cell::Real(if x.is_infinite() { format!("{}inf", if x < 0.0 { "-" } else { "" }) } else { format!("{x:.4}") })
}

/// Six significant digits, scientific notation.
pub fn sci(x: f64) -> Cell {
    Cell::Real(format!("{x:.5e}"))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    header: Vec<&'static str>,
    rows: Vec<Vec<Cell>>,
}

impl Table {
    /// `header` excludes the leading `schema_version` column, which is added here.
    pub fn new(header: &[&'static str]) -> Self {
        let mut h = vec!["schema_version"];
        h.extend_from_slice(header);
        Table {
            header: h,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, cells: Vec<Cell>) {
        assert_eq!(cells.len() + 1, self.header.len(), "row width does not match header");
        let mut row = vec![Cell::Int(SCHEMA_VERSION)];
        row.extend(cells);
        self.rows.push(row);
    }

    pub fn header(&self) -> &[&'static str] {
        &self.header
    }

    pub fn rows(&self) -> &[Vec<Cell>] {
        &self.rows
    }

    pub fn to_csv(&self) -> Result<String, CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| CliError::Output(e.to_string());
        w.write_record(&self.header).map_err(io)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render)).map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Output(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| CliError::Output(e.to_string()))
    }

    pub fn to_json(&self) -> Result<String, CliError> {
        let records: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let map: Map<String, Value> = self
                    .header
                    .iter()
                    .zip(row)
                    .map(|(k, c)| (k.to_string(), c.json()))
                    .collect();
                Value::Object(map)
            })
            .collect();
        let mut s = serde_json::to_string_pretty(&records).map_err(|e| CliError::Output(e.to_string()))?;
        s.push('\n');
        Ok(s)
    }

    pub fn render(&self, format: Format) -> Result<String, CliError> {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }
}
