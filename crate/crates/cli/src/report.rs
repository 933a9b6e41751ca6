//! Run reports: per-check verdicts plus plot-ready tables.

use std::io::Write;

use serde::{Deserialize, Serialize};

use cfinsler_core::equivalence::Verdict;
use cfinsler_core::{Error, Result};

use crate::config::{Format, RunConfig};

pub const TOOL: &str = "cfinsler";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    /// Theorem family the check exercises, e.g. `T6.4`.
    pub tag: String,
    pub name: String,
    pub verdict: Verdict,
    pub message: String,
    /// The module report, with its extremal witnesses.
    pub data: serde_json::Value,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(name: &str, columns: Vec<String>) -> Self {
        Self { name: name.into(), columns, rows: Vec::new() }
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[k]).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub tool: String,
    pub version: String,
    pub schema: u32,
    pub command: String,
    pub config: RunConfig,
    pub checks: Vec<CheckResult>,
    pub tables: Vec<Table>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_time_s: Option<f64>,
}

impl RunReport {
    /// Precondition violations dominate failures; inconclusive checks count as neither.
    pub fn exit_code(&self) -> i32 {
        if self.checks.iter().any(|c| c.verdict == Verdict::PreconditionViolation) {
            2
        } else if self.checks.iter().any(|c| c.verdict == Verdict::Fail) {
            1
        } else {
            0
        }
    }

    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }

    pub fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Records => {
                let mut s = serde_json::to_string_pretty(self)?;
                s.push('\n');
                Ok(s)
            }
            Format::Delimited => self.delimited(),
        }
    }

    fn delimited(&self) -> Result<String> {
        let csv_err = |e: csv::Error| Error::Io(e.to_string());
        let mut out: Vec<u8> = Vec::new();
        writeln!(out, "# {} {} {}", self.tool, self.version, self.command)?;
        writeln!(out, "# config {}", serde_json::to_string(&self.config)?)?;
        {
            let mut w = csv::Writer::from_writer(&mut out);
            w.write_record(["tag", "check", "verdict", "message"]).map_err(csv_err)?;
            for c in &self.checks {
                let v = serde_json::to_value(c.verdict)?;
                w.write_record([c.tag.as_str(), c.name.as_str(), v.as_str().unwrap_or(""), c.message.as_str()]).map_err(csv_err)?;
            }
            w.flush()?;
        }
        for t in &self.tables {
            writeln!(out, "# table {}", t.name)?;
            let mut w = csv::Writer::from_writer(&mut out);
            w.write_record(&t.columns).map_err(csv_err)?;
            for r in &t.rows {
                w.write_record(r.iter().map(|x| format!("{x:.16e}"))).map_err(csv_err)?;
            }
            w.flush()?;
        }
        String::from_utf8(out).map_err(|e| Error::Io(e.to_string()))
    }
}
