use std::io::Write;

use serde::Serialize;

use crate::config::{Command, RunConfig};
use crate::error::{CliError, Result};

/// Rows of plain cells; the CSV form of a report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Self { columns: columns.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn write_csv(&self, out: impl Write) -> std::io::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row)?;
        }
        w.flush()
    }
}

/// Shortest round-trip text for a float, in exponent form when very large or
/// small; `inf` and `NaN` for non-finite values.
pub fn num(x: f64) -> String {
    format!("{x:?}")
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub command: Command,
    pub config: RunConfig,
    /// Whether every verification in the run held.
    pub passed: bool,
    pub expect_fail: bool,
    pub exit_code: i32,
    /// Numerical failure that stopped the pipeline, if any.
    pub error: Option<String>,
    pub results: serde_json::Value,
    pub table: Table,
    pub duration_secs: f64,
}

impl Report {
    pub fn write(&self, out: &mut dyn Write, format: crate::config::Format) -> Result<()> {
        let io = |source| CliError::Io { path: "<output>".into(), source };
        match format {
            crate::config::Format::Json => {
                serde_json::to_writer_pretty(&mut *out, self).map_err(|e| io(e.into()))?;
                writeln!(out).map_err(io)
            }
            crate::config::Format::Csv => self.table.write_csv(out).map_err(io),
        }
    }
}
