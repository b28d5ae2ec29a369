//! JSON and CSV report files.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::lab::config::ExperimentConfig;

/// One pass/fail assertion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Criterion {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

/// One grid-point row of the CSV file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsvRecord {
    pub section: String,
    pub label: String,
    pub t: Option<f64>,
    pub x: Option<f64>,
    pub value: f64,
    pub error: Option<f64>,
    pub reference: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub experiment: String,
    pub anchor: String,
    pub config: ExperimentConfig,
    pub config_hash: String,
    pub criteria: Vec<Criterion>,
    pub pass: bool,
    /// Set when a numerical step failed; the criteria then cover only what ran.
    pub failure: Option<String>,
    pub sections: BTreeMap<String, serde_json::Value>,
    #[serde(skip)]
    pub records: Vec<CsvRecord>,
}

impl Report {
    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn to_csv(&self) -> Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for r in &self.records {
            w.serialize(r)?;
        }
        if self.records.is_empty() {
            w.write_record(["section", "label", "t", "x", "value", "error", "reference"])?;
        }
        Ok(w.into_inner().map_err(|e| e.into_error())?)
    }

    /// Writes `<id>.json` and `<id>.csv` into `dir`, creating it if needed.
    pub fn write(&self, dir: &Path) -> Result<(PathBuf, PathBuf)> {
        std::fs::create_dir_all(dir)?;
        let json = dir.join(format!("{}.json", self.experiment));
        let csv = dir.join(format!("{}.csv", self.experiment));
        std::fs::write(&json, self.to_json()?)?;
        std::fs::write(&csv, self.to_csv()?)?;
        Ok((json, csv))
    }

    /// One `PASS`/`FAIL` line per criterion.
    pub fn summary_lines(&self) -> Vec<String> {
        let mut lines: Vec<String> = self
            .criteria
            .iter()
            .map(|c| format!("{} {}: {}", if c.pass { "PASS" } else { "FAIL" }, c.name, c.detail))
            .collect();
        if let Some(f) = &self.failure {
            lines.push(format!("FAIL numerical failure: {f}"));
        }
        lines
    }
}
