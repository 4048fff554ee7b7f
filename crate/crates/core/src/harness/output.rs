use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::run::RunOutcome;
use super::HarnessError;

pub const SCHEMA_VERSION: u32 = 1;

/// One JSON line: a record payload tagged with its experiment kind.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputRecord {
    pub schema_version: u32,
    pub kind: String,
    pub index: usize,
    pub payload: serde_json::Value,
    pub verdict: String,
}

impl OutputRecord {
    pub fn new<T: Serialize>(kind: &str, index: usize, payload: &T, verdict: &str) -> Self {
        OutputRecord {
            schema_version: SCHEMA_VERSION,
            kind: kind.to_string(),
            index,
            payload: serde_json::to_value(payload).expect("record serializes"),
            verdict: verdict.to_string(),
        }
    }

    pub fn to_line(&self) -> String {
        serde_json::to_string(self).expect("record serializes")
    }

    pub fn from_line(line: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(line)
    }
}

pub fn to_jsonl(records: &[OutputRecord]) -> String {
    let mut out = String::new();
    for r in records {
        out.push_str(&r.to_line());
        out.push('\n');
    }
    out
}

pub fn read_jsonl(path: &Path) -> Result<Vec<OutputRecord>, HarnessError> {
    let text = fs::read_to_string(path)?;
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| OutputRecord::from_line(l).map_err(|e| HarnessError::Experiment(e.to_string())))
        .collect()
}

/// Writes the JSON-lines file, then the CSV table, each in one piece.
pub fn write_outputs(outcome: &RunOutcome, jsonl: &Path, csv_path: &Path) -> Result<(), HarnessError> {
    for p in [jsonl, csv_path] {
        if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir)?;
        }
    }
    fs::File::create(jsonl)?.write_all(to_jsonl(&outcome.records).as_bytes())?;
    let mut w = csv::Writer::from_path(csv_path).map_err(|e| HarnessError::Experiment(e.to_string()))?;
    w.write_record(&outcome.csv_header)
        .map_err(|e| HarnessError::Experiment(e.to_string()))?;
    for row in &outcome.csv_rows {
        w.write_record(row).map_err(|e| HarnessError::Experiment(e.to_string()))?;
    }
    w.flush()?;
    Ok(())
}
