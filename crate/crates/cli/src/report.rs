use std::collections::BTreeMap;
use std::io::Write;

use serde::Serialize;
use serde_json::Value;

/// Top-level output record shared by every subcommand.
#[derive(Debug, Serialize)]
pub struct Report {
    pub version: String,
    pub config: Value,
    pub results: Value,
    pub flags: Vec<String>,
    pub residuals: BTreeMap<String, f64>,
    pub passed: bool,
    #[serde(skip)]
    pub table: Table,
}

/// CSV view of a report.
#[derive(Debug, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }
}

impl Report {
    pub fn write_json(&self, out: &mut dyn Write) -> std::io::Result<()> {
        serde_json::to_writer_pretty(&mut *out, self)?;
        writeln!(out)
    }

    pub fn write_csv(&self, out: &mut dyn Write) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.table.header)?;
        for row in &self.table.rows {
            w.write_record(row)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Shortest round-trip representation; exponent form below 1e-4.
pub fn num(x: f64) -> String {
    if x != 0.0 && x.abs() < 1e-4 {
        format!("{x:e}")
    } else {
        format!("{x}")
    }
}
