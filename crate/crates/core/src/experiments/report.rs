use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::Result;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Table { name: name.into(), columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "{}", self.columns.join(","))?;
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(csv_cell).collect();
            writeln!(w, "{}", cells.join(","))?;
        }
        Ok(())
    }
}

fn csv_cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// A theoretical error term evaluated without implied constants.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bound {
    pub name: String,
    pub terms: Vec<f64>,
    pub value: f64,
}

impl Bound {
    pub fn new(name: &str, terms: &[f64]) -> Self {
        Bound { name: name.into(), terms: terms.to_vec(), value: terms.iter().sum() }
    }
}

/// `exact` verdicts are identities or unconditional inequalities; the others
/// compare against `C * bound` and only warn.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub name: String,
    pub exact: bool,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub max_deviation: Option<f64>,
    pub bounds: Vec<Bound>,
    pub verdicts: Vec<Verdict>,
    pub values: BTreeMap<String, Value>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub config: Value,
    pub tables: Vec<Table>,
    pub summary: Summary,
    /// Wall time in seconds, only when requested; omitted for byte-stable reports.
    pub timing: Option<f64>,
}

impl Report {
    pub fn new(config: Value) -> Self {
        Report { config, tables: Vec::new(), summary: Summary::default(), timing: None }
    }

    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }

    pub fn bound(&self, name: &str) -> Option<&Bound> {
        self.summary.bounds.iter().find(|b| b.name == name)
    }

    pub fn verdict(&self, name: &str) -> Option<&Verdict> {
        self.summary.verdicts.iter().find(|v| v.name == name)
    }

    pub fn value(&self, name: &str) -> Option<&Value> {
        self.summary.values.get(name)
    }

    pub fn set_value(&mut self, name: &str, v: impl Into<Value>) {
        self.summary.values.insert(name.into(), v.into());
    }

    pub fn add_bound(&mut self, bound: Bound) {
        self.summary.bounds.push(bound);
    }

    pub fn exact(&mut self, name: &str, passed: bool, detail: impl Into<String>) {
        self.summary.verdicts.push(Verdict { name: name.into(), exact: true, passed, detail: detail.into() });
    }

    pub fn soft(&mut self, name: &str, passed: bool, detail: impl Into<String>) {
        self.summary.verdicts.push(Verdict { name: name.into(), exact: false, passed, detail: detail.into() });
    }

    pub fn exact_checks_pass(&self) -> bool {
        self.summary.verdicts.iter().all(|v| !v.exact || v.passed)
    }

    pub fn warnings(&self) -> impl Iterator<Item = &Verdict> {
        self.summary.verdicts.iter().filter(|v| !v.exact && !v.passed)
    }

    /// 0 when every exact check passes, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.exact_checks_pass() {
            0
        } else {
            1
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// `report.json` plus one `<table>.csv` per table.
    pub fn save(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        fs::write(dir.join("report.json"), self.to_json()? + "\n")?;
        for t in &self.tables {
            let mut buf = Vec::new();
            t.write_csv(&mut buf)?;
            fs::write(dir.join(format!("{}.csv", t.name)), buf)?;
        }
        Ok(())
    }
}
