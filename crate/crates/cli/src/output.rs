//! Report files: `<name>.jsonl` (one record per case), `<name>.summary.json`,
//! `<name>.csv` for plotting, and `<name>.timing.json` holding wall times so
//! that the other files stay byte-identical across repeated runs.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};

use crate::config::Expect;

/// Observed classification of a case, compared against its expectation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Observed {
    Pass,
    Fail,
    Divergent,
    Indeterminate,
}

impl Observed {
    pub fn from_pass(passed: bool) -> Self {
        if passed {
            Observed::Pass
        } else {
            Observed::Fail
        }
    }

    pub fn meets(self, expect: Expect) -> bool {
        matches!(
            (self, expect),
            (Observed::Pass, Expect::Pass) | (Observed::Fail, Expect::Fail) | (Observed::Divergent, Expect::Divergent)
        )
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Record {
    pub id: String,
    pub expect: Expect,
    pub observed: Observed,
    pub passed: bool,
    pub report: Value,
    #[serde(skip)]
    pub wall_ms: Option<f64>,
}

impl Record {
    pub fn new(id: &str, expect: Expect, observed: Observed, report: Value, wall_ms: Option<f64>) -> Self {
        Self { id: id.to_string(), expect, observed, passed: observed.meets(expect), report, wall_ms }
    }
}

pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Self { header: header.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }
}

pub struct Outcome {
    pub records: Vec<Record>,
    pub table: Table,
    /// Extra summary fields.
    pub summary: Vec<(&'static str, Value)>,
    /// Extra JSON files, written as `<name>.<suffix>.json`.
    pub extra_files: Vec<(&'static str, Value)>,
}

impl Outcome {
    pub fn all_passed(&self) -> bool {
        !self.records.is_empty() && self.records.iter().all(|r| r.passed)
    }
}

pub fn num(x: f64) -> String {
    format!("{x:?}")
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> String {
    format!("{}: {e}", path.display())
}

fn write_json(path: &Path, v: &Value) -> Result<(), String> {
    let mut text = serde_json::to_string_pretty(v).map_err(|e| io_err(path, e))?;
    text.push('\n');
    fs::write(path, text).map_err(|e| io_err(path, e))
}

pub fn write_csv(path: &Path, table: &Table) -> Result<(), String> {
    let mut w = csv::Writer::from_path(path).map_err(|e| io_err(path, e))?;
    w.write_record(&table.header).map_err(|e| io_err(path, e))?;
    for row in &table.rows {
        w.write_record(row).map_err(|e| io_err(path, e))?;
    }
    w.flush().map_err(|e| io_err(path, e))
}

pub fn summary_path(dir: &Path, name: &str) -> PathBuf {
    dir.join(format!("{name}.summary.json"))
}

/// Writes every file of one subcommand run and returns the summary.
pub fn write_outcome(dir: &Path, name: &str, out: &Outcome, total_ms: f64) -> Result<Value, String> {
    fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    let jsonl = dir.join(format!("{name}.jsonl"));
    let mut lines = String::new();
    for r in &out.records {
        lines.push_str(&serde_json::to_string(r).map_err(|e| io_err(&jsonl, e))?);
        lines.push('\n');
    }
    fs::write(&jsonl, lines).map_err(|e| io_err(&jsonl, e))?;
    write_csv(&dir.join(format!("{name}.csv")), &out.table)?;
    for (suffix, v) in &out.extra_files {
        write_json(&dir.join(format!("{name}.{suffix}.json")), v)?;
    }
    let passed = out.records.iter().filter(|r| r.passed).count();
    let mut summary = json!({
        "subcommand": name,
        "cases": out.records.len(),
        "passed": passed,
        "failed": out.records.len() - passed,
        "all_passed": out.all_passed(),
        "failed_ids": out.records.iter().filter(|r| !r.passed).map(|r| r.id.clone()).collect::<Vec<_>>(),
    });
    for (k, v) in &out.summary {
        summary[*k] = v.clone();
    }
    write_json(&summary_path(dir, name), &summary)?;
    let timing = json!({
        "subcommand": name,
        "total_ms": total_ms,
        "cases": out.records.iter().map(|r| json!({ "id": r.id, "wall_ms": r.wall_ms })).collect::<Vec<_>>(),
    });
    write_json(&dir.join(format!("{name}.timing.json")), &timing)?;
    Ok(summary)
}
