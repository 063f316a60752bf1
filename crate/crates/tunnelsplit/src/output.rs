//! Tables and reports, rendered as CSV (comma, `.` decimal, header row, LF)
//! or JSON.

use std::io::Write as _;
use std::path::Path;

use serde::Serialize;

use crate::config::Format;
use crate::error::{CliError, CliResult};

/// Numeric table with a fixed header.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    /// CSV with `precision` significant digits in scientific notation.
    pub fn to_csv(&self, precision: usize) -> String {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        let digits = precision.max(1) - 1;
        let mut record = Vec::with_capacity(self.columns.len());
        // writes into a Vec cannot fail
        w.write_record(&self.columns).unwrap();
        for row in &self.rows {
            record.clear();
            record.extend(row.iter().map(|v| format_number(*v, digits)));
            w.write_record(&record).unwrap();
        }
        String::from_utf8(w.into_inner().unwrap()).unwrap()
    }
}

fn format_number(v: f64, digits: usize) -> String {
    if v.is_finite() {
        format!("{v:.digits$e}")
    } else {
        // `inf`, `-inf` and `NaN` parse back with `str::parse::<f64>`
        v.to_string()
    }
}

/// Parses a CSV produced by [`Table::to_csv`].
pub fn parse_csv(text: &str) -> CliResult<Table> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let bad = |e: csv::Error| CliError::invalid("csv", e.to_string());
    let columns = r.headers().map_err(bad)?.iter().map(str::to_owned).collect();
    let mut rows = Vec::new();
    for record in r.records() {
        let record = record.map_err(bad)?;
        let line = record.position().map_or(0, |p| p.line());
        let row = record
            .iter()
            .map(|f| f.parse::<f64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| CliError::invalid(&format!("csv line {line}"), e.to_string()))?;
        rows.push(row);
    }
    Ok(Table { columns, rows })
}

/// What a command produces.
#[derive(Debug, Clone, PartialEq)]
pub enum Output {
    /// A table, optionally with a summary that only JSON output carries.
    Table {
        table: Table,
        summary: Option<serde_json::Value>,
    },
    /// A report; CSV output shows its table.
    Report {
        table: Table,
        report: serde_json::Value,
    },
}

impl Output {
    pub fn table(&self) -> &Table {
        match self {
            Output::Table { table, .. } | Output::Report { table, .. } => table,
        }
    }

    pub fn render(&self, format: Format, precision: usize) -> CliResult<String> {
        match format {
            Format::Csv => Ok(self.table().to_csv(precision)),
            Format::Json => {
                let value = match self {
                    Output::Table { table, summary } => {
                        let mut v = serde_json::json!({
                            "columns": table.columns,
                            "rows": table.rows,
                        });
                        if let Some(s) = summary {
                            v["summary"] = s.clone();
                        }
                        v
                    }
                    Output::Report { report, .. } => report.clone(),
                };
                let mut s = serde_json::to_string_pretty(&value)
                    .map_err(|e| CliError::invalid("output", e.to_string()))?;
                s.push('\n');
                Ok(s)
            }
        }
    }
}

/// Writes to `path`, or to stdout when absent.
pub fn emit(text: &str, path: Option<&Path>) -> CliResult<()> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|source| CliError::Write {
            path: p.to_owned(),
            source,
        }),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|source| CliError::Write {
                    path: "<stdout>".into(),
                    source,
                })
        }
    }
}
