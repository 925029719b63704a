//! CSV ingestion and result files.
//!
//! Input holds one series per row. Rows may differ in length; trailing empty
//! cells are dropped, but an empty cell before the last value is an error.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::cluster::ClusterResult;
use crate::error::{Error, Result};
use crate::series::TimeSeries;

#[derive(Debug, Clone, Copy, Default)]
pub struct IngestOptions {
    /// Drop the first cell of every row (UCR class label).
    pub labels: bool,
    /// Cell separator. `None` picks tab for `.tsv` files and comma otherwise.
    pub delimiter: Option<char>,
}

/// Read every row of every file as a series with id `<file stem>:<line>`.
pub fn ingest(paths: &[PathBuf], opts: IngestOptions) -> Result<Vec<TimeSeries>> {
    let mut out = Vec::new();
    for path in paths {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        out.extend(parse_rows(path, &text, opts)?);
    }
    if out.is_empty() {
        return Err(Error::EmptyDataset);
    }
    Ok(out)
}

fn delimiter_for(path: &Path, opts: IngestOptions) -> char {
    opts.delimiter
        .unwrap_or_else(|| match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("tsv") => '\t',
            _ => ',',
        })
}

pub(crate) fn parse_rows(path: &Path, text: &str, opts: IngestOptions) -> Result<Vec<TimeSeries>> {
    let delim = delimiter_for(path, opts);
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let skip = usize::from(opts.labels);

    let mut series = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        if raw.trim().is_empty() {
            continue;
        }
        let cells: Vec<&str> = raw.split(delim).collect();
        let last = cells
            .iter()
            .rposition(|c| !c.trim().is_empty())
            .filter(|&pos| pos >= skip)
            .ok_or_else(|| Error::EmptySeries {
                path: path.to_path_buf(),
                line,
            })?;

        let mut samples = Vec::with_capacity(last + 1 - skip);
        for (col, cell) in cells.iter().enumerate().take(last + 1).skip(skip) {
            let cell = cell.trim();
            match cell.parse::<f64>() {
                Ok(v) if v.is_finite() => samples.push(v),
                _ => {
                    return Err(Error::ParseFailure {
                        path: path.to_path_buf(),
                        line,
                        column: col + 1,
                        cell: cell.to_string(),
                    })
                }
            }
        }
        series.push(TimeSeries::new(format!("{stem}:{line}"), samples)?);
    }
    Ok(series)
}

/// Flat record written to `summary.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub dataset: String,
    pub p: usize,
    pub length_min: usize,
    pub length_median: f64,
    pub length_max: usize,
    pub method: String,
    pub k: usize,
    pub window: String,
    pub workers: usize,
    pub normalized: bool,
    pub total_cost: f64,
    pub certificate: String,
    pub nodes_explored: Option<u64>,
    pub mean_silhouette: Option<f64>,
    pub ingest_seconds: f64,
    pub matrix_seconds: f64,
    pub cluster_seconds: f64,
    pub scores_seconds: f64,
    pub computed_pairs: usize,
}

impl RunSummary {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::FormatViolation {
            path: path.to_path_buf(),
            line: e.line(),
            message: e.to_string(),
        })
    }
}

pub(crate) fn length_stats(dataset: &[TimeSeries]) -> (usize, f64, usize) {
    let mut lens: Vec<usize> = dataset.iter().map(TimeSeries::len).collect();
    lens.sort_unstable();
    let n = lens.len();
    let median = if n % 2 == 1 {
        lens[n / 2] as f64
    } else {
        (lens[n / 2 - 1] + lens[n / 2]) as f64 / 2.0
    };
    (lens[0], median, lens[n - 1])
}

fn write(path: &Path, contents: String) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

/// `series_id,medoid_id` per series.
pub fn write_assignments(path: &Path, dataset: &[TimeSeries], result: &ClusterResult) -> Result<()> {
    let mut out = String::from("series_id,medoid_id\n");
    for (s, &m) in dataset.iter().zip(&result.assignment) {
        writeln!(out, "{},{}", s.id(), dataset[m].id()).unwrap();
    }
    write(path, out)
}

pub fn write_medoids(path: &Path, dataset: &[TimeSeries], result: &ClusterResult) -> Result<()> {
    let mut out = String::from("medoid_id\n");
    for &m in &result.medoids {
        writeln!(out, "{}", dataset[m].id()).unwrap();
    }
    write(path, out)
}

pub fn write_summary(path: &Path, summary: &RunSummary) -> Result<()> {
    let mut json = serde_json::to_string_pretty(summary).expect("summary serializes");
    json.push('\n');
    write(path, json)
}

/// Silhouette rows, then a blank line and the `k,cost` elbow rows.
pub fn write_scores(
    path: &Path,
    dataset: &[TimeSeries],
    silhouette: Option<&[f64]>,
    elbow: &[(usize, f64)],
) -> Result<()> {
    let mut out = String::from("series_id,silhouette\n");
    if let Some(values) = silhouette {
        for (s, v) in dataset.iter().zip(values) {
            writeln!(out, "{},{v}", s.id()).unwrap();
        }
    }
    out.push_str("\nk,cost\n");
    for (k, cost) in elbow {
        writeln!(out, "{k},{cost}").unwrap();
    }
    write(path, out)
}

/// Rebuild `(medoids, assignment)` as 0-based indices from the two CSV files.
pub fn read_assignments(
    assignments: &Path,
    medoids: &Path,
    dataset: &[TimeSeries],
) -> Result<(Vec<usize>, Vec<usize>)> {
    let index: HashMap<&str, usize> = dataset.iter().enumerate().map(|(i, s)| (s.id(), i)).collect();
    let lookup = |path: &Path, line: usize, id: &str| {
        index.get(id).copied().ok_or_else(|| Error::FormatViolation {
            path: path.to_path_buf(),
            line,
            message: format!("unknown series id `{id}`"),
        })
    };

    let text = fs::read_to_string(medoids).map_err(|e| Error::io(medoids, e))?;
    let mut medoid_idx = Vec::new();
    for (n, line) in text.lines().enumerate().skip(1) {
        if !line.is_empty() {
            medoid_idx.push(lookup(medoids, n + 1, line)?);
        }
    }
    medoid_idx.sort_unstable();

    let text = fs::read_to_string(assignments).map_err(|e| Error::io(assignments, e))?;
    let mut assignment = vec![usize::MAX; dataset.len()];
    for (n, line) in text.lines().enumerate().skip(1) {
        if line.is_empty() {
            continue;
        }
        let (series, medoid) = line.rsplit_once(',').ok_or_else(|| Error::FormatViolation {
            path: assignments.to_path_buf(),
            line: n + 1,
            message: "expected `series_id,medoid_id`".into(),
        })?;
        assignment[lookup(assignments, n + 1, series)?] = lookup(assignments, n + 1, medoid)?;
    }
    if let Some(j) = assignment.iter().position(|&m| m == usize::MAX) {
        return Err(Error::FormatViolation {
            path: assignments.to_path_buf(),
            line: 0,
            message: format!("series `{}` has no assignment", dataset[j].id()),
        });
    }
    Ok((medoid_idx, assignment))
}
