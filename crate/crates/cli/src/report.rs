use std::fs;
use std::path::{Path, PathBuf};

use lclab::MCEstimate;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{CliError, CliResult};

/// One CSV line of a sweep.
#[derive(Debug, Clone, Serialize)]
pub struct Row {
    pub n: usize,
    pub quantity: String,
    pub estimate: f64,
    pub std_error: f64,
    pub paper_bound: Option<f64>,
    pub ratio: Option<f64>,
}

impl Row {
    pub fn new(n: usize, quantity: impl Into<String>, e: &MCEstimate, bound: Option<f64>) -> Self {
        Row {
            n,
            quantity: quantity.into(),
            estimate: e.value,
            std_error: e.std_error,
            paper_bound: bound,
            ratio: bound.filter(|b| *b != 0.0).map(|b| e.value / b),
        }
    }

    pub fn exact(n: usize, quantity: impl Into<String>, value: f64, bound: Option<f64>) -> Self {
        Row::new(n, quantity, &MCEstimate::exact(value), bound)
    }
}

/// An asserted inequality; a failing bound makes the run exit with status 2.
#[derive(Debug, Clone, Serialize)]
pub struct Bound {
    pub name: String,
    pub holds: bool,
    pub detail: String,
}

impl Bound {
    pub fn new(name: impl Into<String>, holds: bool, detail: impl Into<String>) -> Self {
        Bound { name: name.into(), holds, detail: detail.into() }
    }
}

#[derive(Debug, Default)]
pub struct Report {
    pub result: Value,
    pub rows: Vec<Row>,
    pub bounds: Vec<Bound>,
    /// Extra output files (name, bytes), e.g. grids.
    pub files: Vec<(String, Vec<u8>)>,
}

impl Report {
    pub fn violated(&self) -> Vec<&Bound> {
        self.bounds.iter().filter(|b| !b.holds).collect()
    }

    pub fn to_json(&self, command: &str, config: &Value) -> Value {
        json!({
            "command": command,
            "config": config,
            "result": self.result,
            "bounds": self.bounds,
            "all_bounds_hold": self.violated().is_empty(),
        })
    }

    pub fn csv_bytes(&self) -> CliResult<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for r in &self.rows {
            w.serialize(r)?;
        }
        w.into_inner().map_err(|e| CliError::Io { path: PathBuf::from("rows.csv"), message: e.to_string() })
    }
}

pub fn pretty(v: &Value) -> CliResult<Vec<u8>> {
    let mut s = serde_json::to_vec_pretty(v)?;
    s.push(b'\n');
    Ok(s)
}

/// Record of a run sufficient to reproduce its outputs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub config: Value,
    pub seed: Option<u64>,
    pub version: String,
    pub threads: Option<usize>,
    /// Catalog file in effect (from `LCLAB_CATALOG`).
    pub catalog: Option<PathBuf>,
    pub wall_time_seconds: f64,
    /// Output file names, relative to the manifest's directory.
    pub outputs: Vec<String>,
}

pub const MANIFEST_NAME: &str = "manifest.json";

/// Writes report.json, rows.csv and extra files into `dir`; returns their names.
pub fn write_outputs(dir: &Path, report: &Report, command: &str, config: &Value) -> CliResult<Vec<String>> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let mut files = vec![("report.json".to_string(), pretty(&report.to_json(command, config))?)];
    if !report.rows.is_empty() {
        files.push(("rows.csv".to_string(), report.csv_bytes()?));
    }
    files.extend(report.files.iter().cloned());
    let mut names = Vec::new();
    for (name, bytes) in files {
        let path = dir.join(&name);
        fs::write(&path, bytes).map_err(|e| CliError::io(&path, e))?;
        names.push(name);
    }
    Ok(names)
}

pub fn write_manifest(dir: &Path, manifest: &RunManifest) -> CliResult<()> {
    let path = dir.join(MANIFEST_NAME);
    let bytes = pretty(&serde_json::to_value(manifest)?)?;
    fs::write(&path, bytes).map_err(|e| CliError::io(&path, e))
}

pub fn read_manifest(path: &Path) -> CliResult<RunManifest> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    Ok(serde_json::from_str(&text)?)
}
