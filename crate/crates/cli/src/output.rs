use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use gil_core::body::{BodyError, BodyFile, ExactPolytope, Polytope};
use gil_core::gauss_image::QuerySet;
use gil_core::measure::SphericalMeasure;
use gil_core::report::CheckReport;
use serde_json::Value;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {msg}")]
    Parse { path: PathBuf, msg: String },
    #[error("{path}: {source}")]
    Body { path: PathBuf, source: BodyError },
    #[error("{0}")]
    Input(String),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn input(e: impl std::fmt::Display) -> Self {
        CliError::Input(e.to_string())
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

fn body_file(path: &Path) -> Result<BodyFile, CliError> {
    BodyFile::parse(&read(path)?).map_err(|source| CliError::Body { path: path.to_path_buf(), source })
}

pub fn load_body(path: &Path) -> Result<Polytope, CliError> {
    body_file(path)?.to_polytope().map_err(|source| CliError::Body { path: path.to_path_buf(), source })
}

pub fn load_exact_body(path: &Path) -> Result<ExactPolytope, CliError> {
    body_file(path)?.to_exact().map_err(|source| CliError::Body { path: path.to_path_buf(), source })
}

fn load_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    serde_json::from_str(&read(path)?).map_err(|e| CliError::Parse { path: path.to_path_buf(), msg: e.to_string() })
}

pub fn load_measure(path: &Path) -> Result<SphericalMeasure, CliError> {
    load_json(path)
}

pub fn load_query(path: &Path) -> Result<QuerySet, CliError> {
    load_json(path)
}

/// Writes `text` to `path`, or to stdout.
pub fn emit(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, text).map_err(|source| CliError::Io { path: p.to_path_buf(), source }),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|source| CliError::Io { path: "<stdout>".into(), source })
        }
    }
}

pub fn to_json<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("values serialize");
    s.push('\n');
    s
}

/// Body file text with one vertex per line.
pub fn body_file_json(f: &BodyFile) -> String {
    let rows: Vec<String> = f
        .vertices
        .iter()
        .map(|v| format!("    {}", serde_json::to_string(v).expect("coordinates serialize")))
        .collect();
    format!("{{\n  \"vertices\": [\n{}\n  ]\n}}\n", rows.join(",\n"))
}

pub fn body_json(p: &Polytope) -> String {
    body_file_json(&BodyFile::from_polytope(p))
}

/// Records the run's knobs verbatim under `config`.
pub fn record(report: &mut CheckReport, command: &str, knobs: Vec<(&str, Value)>) {
    report.config("command", command);
    for (k, v) in knobs {
        report.config(k, v);
    }
}

pub fn path_value(p: &Path) -> Value {
    Value::String(p.display().to_string())
}

pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.flush().map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

/// The report table as CSV: the set id, then every value column in
/// name order. Missing values are left empty.
pub fn write_table_csv(path: &Path, report: &CheckReport) -> Result<(), CliError> {
    let mut cols: Vec<&str> = report.table.iter().flat_map(|w| w.values.keys().map(String::as_str)).collect();
    cols.sort_unstable();
    cols.dedup();
    let mut header = vec!["set"];
    header.extend(&cols);
    let rows: Vec<Vec<String>> = report
        .table
        .iter()
        .map(|w| {
            let mut r = vec![w.set.clone()];
            r.extend(cols.iter().map(|c| w.values.get(*c).map(|v| v.to_string()).unwrap_or_default()));
            r
        })
        .collect();
    write_csv(path, &header, &rows)
}
