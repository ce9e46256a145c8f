//! Tabular reports with fixed, versioned columns, written as CSV or as JSON
//! that mirrors the CSV cells and echoes the run configuration.

use crate::config::{Format, RunConfig};
use crate::CliError;
use std::fs;
use std::io::Write;

/// Version of the column layout of every report.
pub const REPORT_VERSION: u32 = 1;

/// One cell of a report.
#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Int(i128),
    Float(f64),
    Text(String),
    Bool(bool),
}

impl From<i128> for Cell {
    fn from(v: i128) -> Self {
        Cell::Int(v)
    }
}
impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::Int(v as i128)
    }
}
impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v as i128)
    }
}
impl From<u8> for Cell {
    fn from(v: u8) -> Self {
        Cell::Int(v as i128)
    }
}
impl From<u32> for Cell {
    fn from(v: u32) -> Self {
        Cell::Int(v as i128)
    }
}
impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i128)
    }
}
impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}
impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}
impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}
impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

/// A float with 15 significant digits.
pub fn fmt_float(v: f64) -> String {
    if v == 0.0 {
        "0".into()
    } else if v.is_finite() {
        format!("{v:.14e}")
    } else {
        format!("{v}")
    }
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => fmt_float(*v),
            Cell::Bool(v) => v.to_string(),
            Cell::Text(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
            Cell::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> serde_json::Value {
        match self {
            Cell::Int(v) => match i64::try_from(*v) {
                Ok(i) => serde_json::Value::from(i),
                Err(_) => serde_json::Value::from(v.to_string()),
            },
            Cell::Float(v) => fmt_float(*v)
                .parse::<f64>()
                .ok()
                .and_then(serde_json::Number::from_f64)
                .map(serde_json::Value::Number)
                .unwrap_or(serde_json::Value::Null),
            Cell::Bool(v) => serde_json::Value::from(*v),
            Cell::Text(s) => serde_json::Value::from(s.clone()),
        }
    }
}

/// A table with named columns.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub name: String,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: impl Into<String>, columns: &[&'static str]) -> Self {
        Table { name: name.into(), columns: columns.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut s = format!("# {} v{REPORT_VERSION}\n{}\n", self.name, self.columns.join(","));
        for r in &self.rows {
            s.push_str(&r.iter().map(Cell::csv).collect::<Vec<_>>().join(","));
            s.push('\n');
        }
        s
    }

    fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "name": self.name,
            "version": REPORT_VERSION,
            "columns": self.columns,
            "rows": self.rows.iter().map(|r| r.iter().map(Cell::json).collect::<Vec<_>>()).collect::<Vec<_>>(),
        })
    }
}

/// The tables produced by one subcommand.
#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub command: &'static str,
    pub tables: Vec<Table>,
}

impl Report {
    pub fn to_json(&self, cfg: &RunConfig) -> String {
        let v = serde_json::json!({
            "command": self.command,
            "version": REPORT_VERSION,
            "config": cfg,
            "tables": self.tables.iter().map(Table::to_json).collect::<Vec<_>>(),
        });
        serde_json::to_string_pretty(&v).expect("report serialises") + "\n"
    }

    /// Writes to `--out` (one CSV per table, or one JSON document) or to stdout.
    pub fn emit(&self, cfg: &RunConfig) -> Result<(), CliError> {
        match (&cfg.out, cfg.format) {
            (Some(dir), Format::Csv) => {
                fs::create_dir_all(dir)?;
                for t in &self.tables {
                    fs::write(dir.join(format!("{}_{}.csv", self.command, t.name)), t.to_csv())?;
                }
            }
            (Some(dir), Format::Json) => {
                fs::create_dir_all(dir)?;
                fs::write(dir.join(format!("{}.json", self.command)), self.to_json(cfg))?;
            }
            (None, Format::Csv) => {
                let mut out = std::io::stdout().lock();
                for (i, t) in self.tables.iter().enumerate() {
                    if i > 0 {
                        writeln!(out)?;
                    }
                    out.write_all(t.to_csv().as_bytes())?;
                }
            }
            (None, Format::Json) => std::io::stdout().lock().write_all(self.to_json(cfg).as_bytes())?,
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_formatting() {
        assert_eq!(fmt_float(0.0), "0");
        assert_eq!(fmt_float(1.5), "1.50000000000000e0");
        assert_eq!(fmt_float(-2.0 / 3.0), "-6.66666666666667e-1");
    }

    #[test]
    fn csv_quoting() {
        let mut t = Table::new("t", &["a", "b"]);
        t.push(vec![Cell::from("x,y"), Cell::from(3i64)]);
        assert_eq!(t.to_csv(), "# t v1\na,b\n\"x,y\",3\n");
    }
}
