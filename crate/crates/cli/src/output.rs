//! Result tables, check records and their CSV/JSON renderings.

use std::fmt::Write as _;
use std::io;

use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::config::Settings;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Cell {
    Float(f64),
    Int(i64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

/// Seventeen significant digits.
pub fn format_float(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        v.to_string()
    }
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Float(v) => format_float(*v),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Self {
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width");
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::csv).collect();
            let _ = writeln!(out, "{}", cells.join(","));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl Check {
    /// Passes when `value ≤ tolerance`.
    pub fn at_most(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            value,
            tolerance,
            passed: value <= tolerance,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub table: Table,
    pub checks: Vec<Check>,
    pub info: Map<String, Value>,
}

impl Report {
    pub fn new(table: Table) -> Self {
        Self {
            table,
            checks: Vec::new(),
            info: Map::new(),
        }
    }

    pub fn check(&mut self, check: Check) {
        self.checks.push(check);
    }

    pub fn info(&mut self, key: &str, value: impl Serialize) {
        let v = serde_json::to_value(value).unwrap_or(Value::Null);
        self.info.insert(key.to_string(), v);
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn summary(&self, settings: &Settings, with_rows: bool) -> Value {
        let mut v = json!({
            "schema_version": SCHEMA_VERSION,
            "command": settings.command.name(),
            "inputs": settings,
            "checks": self.checks,
            "info": self.info,
            "passed": self.passed(),
        });
        if with_rows {
            v["columns"] = json!(self.table.columns);
            v["rows"] = json!(self.table.rows);
        }
        v
    }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
    s.push('\n');
    s
}

/// Writes the report. With an output path the CSV and the JSON summary go to
/// `<stem>.csv` and `<stem>.json`; otherwise the primary document goes to
/// `stdout` and, for CSV, the summary to `stderr`.
pub fn emit(report: &Report, settings: &Settings, stdout: &mut impl io::Write, stderr: &mut impl io::Write) -> io::Result<()> {
    use crate::config::Format;
    match (&settings.out, settings.format) {
        (Some(path), Format::Csv) => {
            std::fs::write(path.with_extension("csv"), report.table.to_csv())?;
            std::fs::write(path.with_extension("json"), pretty(&report.summary(settings, false)))
        }
        (Some(path), Format::Json) => std::fs::write(path.with_extension("json"), pretty(&report.summary(settings, true))),
        (None, Format::Csv) => {
            stdout.write_all(report.table.to_csv().as_bytes())?;
            stderr.write_all(pretty(&report.summary(settings, false)).as_bytes())
        }
        (None, Format::Json) => stdout.write_all(pretty(&report.summary(settings, true)).as_bytes()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_layout() {
        let mut t = Table::new(&["a", "b", "c"]);
        t.push(vec![0.25.into(), 3usize.into(), "x".into()]);
        t.push(vec![(-1.0 / 3.0).into(), true.into(), "y".into()]);
        assert_eq!(
            t.to_csv(),
            "a,b,c\n2.5000000000000000e-1,3,x\n-3.3333333333333331e-1,1,y\n"
        );
    }

    #[test]
    fn seventeen_digits_round_trip() {
        for v in [0.1, 1.0 / 3.0, 2.0f64.sqrt() * 1e-300, 6.02e23] {
            let s = format_float(v);
            assert_eq!(s.parse::<f64>().unwrap(), v);
            let mantissa = s.split('e').next().unwrap().replace(['.', '-'], "");
            assert_eq!(mantissa.len(), 17);
        }
    }

    #[test]
    fn checks() {
        assert!(Check::at_most("x", 1e-9, 1e-8).passed);
        assert!(!Check::at_most("x", f64::NAN, 1e-8).passed);
    }
}
