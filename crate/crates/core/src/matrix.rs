//! Pairwise DTW distance matrix in condensed upper-triangle storage.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};

use rayon::prelude::*;

use crate::dtw::banded_cost;
use crate::error::{Error, Result};
use crate::series::{validate_dataset, TimeSeries, WarpWindow};

/// Read access to pairwise distances by 0-based series index.
pub trait Distances: Sync {
    /// Number of series.
    fn size(&self) -> usize;

    /// Distance between series `i` and `j`. Panics when an index is out of range.
    fn distance(&self, i: usize, j: usize) -> f64;
}

/// Symmetric, zero-diagonal `p × p` matrix holding only the `p(p-1)/2`
/// entries above the diagonal, row by row.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    p: usize,
    values: Vec<f64>,
}

#[inline]
fn row_start(p: usize, i: usize) -> usize {
    i * p - i * (i + 1) / 2
}

impl DistanceMatrix {
    /// Build from condensed values; validates length, finiteness and sign.
    pub fn from_condensed(p: usize, values: Vec<f64>) -> Result<Self> {
        if p == 0 {
            return Err(Error::DistanceMatrixInvalid("matrix has no rows".into()));
        }
        if values.len() != p * (p - 1) / 2 {
            return Err(Error::DistanceMatrixInvalid(format!(
                "expected {} condensed entries for p = {p}, got {}",
                p * (p - 1) / 2,
                values.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite() || **v < 0.0) {
            return Err(Error::DistanceMatrixInvalid(format!(
                "entry {v} is negative or not finite"
            )));
        }
        Ok(Self { p, values })
    }

    /// Build from a full row-major `p × p` matrix, which must be symmetric
    /// with an exactly zero diagonal.
    pub fn from_full(p: usize, full: &[f64]) -> Result<Self> {
        if full.len() != p * p {
            return Err(Error::DistanceMatrixInvalid(format!(
                "expected {} entries, got {}",
                p * p,
                full.len()
            )));
        }
        for i in 0..p {
            if full[i * p + i] != 0.0 {
                return Err(Error::DistanceMatrixInvalid(format!("diagonal entry {i} is not zero")));
            }
            for j in i + 1..p {
                if full[i * p + j] != full[j * p + i] {
                    return Err(Error::DistanceMatrixInvalid(format!(
                        "entries ({i},{j}) and ({j},{i}) differ"
                    )));
                }
            }
        }
        let values = (0..p)
            .flat_map(|i| (i + 1..p).map(move |j| (i, j)))
            .map(|(i, j)| full[i * p + j])
            .collect();
        Self::from_condensed(p, values)
    }

    pub fn len(&self) -> usize {
        self.p
    }

    pub fn is_empty(&self) -> bool {
        self.p == 0
    }

    pub fn condensed(&self) -> &[f64] {
        &self.values
    }

    /// Offset of `(i, j)` in condensed storage; `i != j`.
    #[inline]
    pub fn offset(&self, i: usize, j: usize) -> usize {
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        row_start(self.p, a) + (b - a - 1)
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        assert!(i < self.p && j < self.p, "index out of range for {} series", self.p);
        if i == j {
            0.0
        } else {
            self.values[self.offset(i, j)]
        }
    }

    pub fn checked_get(&self, i: usize, j: usize) -> Result<f64> {
        for index in [i, j] {
            if index >= self.p {
                return Err(Error::IndexOutOfRange { index, len: self.p });
            }
        }
        Ok(self.get(i, j))
    }

    /// Dense row-major copy.
    pub fn to_full(&self) -> Vec<f64> {
        let p = self.p;
        let mut full = vec![0.0; p * p];
        for i in 0..p {
            for j in i + 1..p {
                let v = self.values[self.offset(i, j)];
                full[i * p + j] = v;
                full[j * p + i] = v;
            }
        }
        full
    }

    /// Row sums `Σⱼ d(i, j)`.
    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.p).map(|i| (0..self.p).map(|j| self.get(i, j)).sum()).collect()
    }

    /// Write the full symmetric matrix as text: `p=<p>` followed by `p`
    /// comma-separated rows. Values use shortest round-trip formatting.
    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut out = String::with_capacity(self.p * self.p * 8 + 16);
        writeln!(out, "p={}", self.p).unwrap();
        for i in 0..self.p {
            for j in 0..self.p {
                if j > 0 {
                    out.push(',');
                }
                if i == j {
                    out.push('0');
                } else {
                    write!(out, "{}", self.get(i, j)).unwrap();
                }
            }
            out.push('\n');
        }
        fs::write(path, out).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let violation = |line: usize, message: String| Error::FormatViolation {
            path: path.to_path_buf(),
            line,
            message,
        };

        let mut lines = text.lines();
        let header = lines
            .next()
            .ok_or_else(|| violation(1, "missing `p=<n>` header".into()))?;
        let p: usize = header
            .strip_prefix("p=")
            .and_then(|v| v.trim().parse().ok())
            .filter(|&p| p > 0)
            .ok_or_else(|| violation(1, format!("bad header `{header}`, expected `p=<n>`")))?;

        let mut full = Vec::with_capacity(p * p);
        for i in 0..p {
            let line_no = i + 2;
            let line = lines
                .next()
                .ok_or_else(|| violation(line_no, format!("expected {p} rows, found {i}")))?;
            let cells: Vec<&str> = line.split(',').collect();
            if cells.len() != p {
                return Err(violation(
                    line_no,
                    format!("expected {p} values, found {}", cells.len()),
                ));
            }
            for (j, cell) in cells.iter().enumerate() {
                let v: f64 = cell
                    .trim()
                    .parse()
                    .map_err(|_| violation(line_no, format!("column {}: `{cell}` is not a number", j + 1)))?;
                if !v.is_finite() || v < 0.0 {
                    return Err(violation(
                        line_no,
                        format!("column {}: {v} is negative or not finite", j + 1),
                    ));
                }
                if i == j && v != 0.0 {
                    return Err(violation(line_no, format!("diagonal entry is {v}, must be 0")));
                }
                if j < i && v != full[j * p + i] {
                    return Err(violation(
                        line_no,
                        format!("entry ({},{}) differs from its transpose", i + 1, j + 1),
                    ));
                }
                full.push(v);
            }
        }
        if let Some((k, extra)) = lines.enumerate().find(|(_, l)| !l.trim().is_empty()) {
            return Err(violation(p + 2 + k, format!("unexpected trailing content `{extra}`")));
        }
        Self::from_full(p, &full)
    }
}

impl Distances for DistanceMatrix {
    fn size(&self) -> usize {
        self.p
    }

    fn distance(&self, i: usize, j: usize) -> f64 {
        self.get(i, j)
    }
}

/// Parallel construction of a [`DistanceMatrix`] from a dataset.
#[derive(Debug, Clone, Copy)]
pub struct MatrixBuilder {
    window: WarpWindow,
    auto_widen: bool,
    workers: usize,
}

impl MatrixBuilder {
    pub fn new(window: WarpWindow) -> Self {
        Self {
            window,
            auto_widen: false,
            workers: 1,
        }
    }

    /// Clamp a bounded window up to `|n - m|` per pair instead of failing.
    pub fn auto_widen(mut self, yes: bool) -> Self {
        self.auto_widen = yes;
        self
    }

    pub fn workers(mut self, workers: usize) -> Self {
        self.workers = workers;
        self
    }

    pub fn build(&self, dataset: &[TimeSeries]) -> Result<DistanceMatrix> {
        self.build_counted(dataset).map(|(m, _)| m)
    }

    /// Build and also return the number of DTW evaluations performed.
    pub fn build_counted(&self, dataset: &[TimeSeries]) -> Result<(DistanceMatrix, usize)> {
        if self.workers == 0 {
            return Err(Error::Config("workers must be at least 1".into()));
        }
        validate_dataset(dataset)?;
        let p = dataset.len();
        if !self.auto_widen {
            check_pairs(dataset, self.window)?;
        }

        let total = p * (p - 1) / 2;
        let mut values = vec![0.0; total];
        let evaluations = AtomicUsize::new(0);
        // Each pair owns a fixed slot, so the result does not depend on scheduling.
        let chunk = (total / (self.workers * 8)).clamp(1, 4096);

        let fill = |values: &mut [f64]| {
            values.par_chunks_mut(chunk).enumerate().for_each(|(c, out)| {
                let (mut i, mut j) = condensed_to_pair(p, c * chunk);
                for slot in out.iter_mut() {
                    let (x, y) = (dataset[i].samples(), dataset[j].samples());
                    let w = self.effective_window(x.len(), y.len());
                    *slot = banded_cost(x, y, w);
                    evaluations.fetch_add(1, Ordering::Relaxed);
                    j += 1;
                    if j == p {
                        i += 1;
                        j = i + 1;
                    }
                }
            });
        };

        rayon::ThreadPoolBuilder::new()
            .num_threads(self.workers)
            .build()
            .map_err(|e| Error::Config(e.to_string()))?
            .install(|| fill(&mut values));

        let matrix = DistanceMatrix { p, values };
        Ok((matrix, evaluations.into_inner()))
    }

    fn effective_window(&self, n: usize, m: usize) -> usize {
        let window = if self.auto_widen {
            self.window.widened_for(n, m)
        } else {
            self.window
        };
        window.half_width_for(n, m)
    }
}

/// Build the full matrix with `workers` parallel tasks.
pub fn build_matrix(dataset: &[TimeSeries], window: WarpWindow, workers: usize) -> Result<DistanceMatrix> {
    MatrixBuilder::new(window).workers(workers).build(dataset)
}

/// Fail with the first infeasible pair in row-major order.
pub(crate) fn check_pairs(dataset: &[TimeSeries], window: WarpWindow) -> Result<()> {
    if matches!(window, WarpWindow::Unlimited) {
        return Ok(());
    }
    for (i, a) in dataset.iter().enumerate() {
        for (j, b) in dataset.iter().enumerate().skip(i + 1) {
            if !window.is_feasible(a.len(), b.len()) {
                return Err(Error::BandInfeasible {
                    half_width: window.half_width_for(a.len(), b.len()),
                    n: a.len(),
                    m: b.len(),
                    pair: Some((i, j)),
                });
            }
        }
    }
    Ok(())
}

fn condensed_to_pair(p: usize, offset: usize) -> (usize, usize) {
    let mut i = 0;
    while row_start(p, i + 1) <= offset {
        i += 1;
    }
    (i, i + 1 + offset - row_start(p, i))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series(rows: &[&[f64]]) -> Vec<TimeSeries> {
        rows.iter()
            .enumerate()
            .map(|(i, r)| TimeSeries::new(format!("s{i}"), r.to_vec()).unwrap())
            .collect()
    }

    #[test]
    fn condensed_offsets_cover_upper_triangle() {
        let p = 6;
        let m = DistanceMatrix::from_condensed(p, (0..15).map(f64::from).collect()).unwrap();
        let mut k = 0;
        for i in 0..p {
            for j in i + 1..p {
                assert_eq!(m.offset(i, j), k);
                assert_eq!(m.offset(j, i), k);
                assert_eq!(condensed_to_pair(p, k), (i, j));
                k += 1;
            }
        }
    }

    #[test]
    fn single_series_matrix() {
        let m = build_matrix(&series(&[&[1.0, 2.0, 3.0]]), WarpWindow::Unlimited, 1).unwrap();
        assert_eq!(m.len(), 1);
        assert_eq!(m.get(0, 0), 0.0);
        assert!(m.condensed().is_empty());
    }

    #[test]
    fn warped_pair_is_zero() {
        let m = build_matrix(
            &series(&[&[1.0, 2.0, 3.0], &[1.0, 2.0, 2.0, 3.0]]),
            WarpWindow::Unlimited,
            2,
        )
        .unwrap();
        assert_eq!(m.get(0, 1), 0.0);
    }

    #[test]
    fn counts_every_pair_once() {
        let data = series(&[&[1.0], &[2.0, 3.0], &[4.0], &[0.0, 0.0, 1.0], &[5.0]]);
        let (m, evals) = MatrixBuilder::new(WarpWindow::Unlimited)
            .workers(3)
            .build_counted(&data)
            .unwrap();
        assert_eq!(evals, 10);
        assert_eq!(m.get(0, 2), 9.0);
    }

    #[test]
    fn infeasible_pair_reported() {
        let data = series(&[&[1.0], &[1.0, 2.0], &[1.0, 2.0, 3.0, 4.0]]);
        let err = build_matrix(&data, WarpWindow::HalfWidth(1), 1).unwrap_err();
        assert!(matches!(err, Error::BandInfeasible { pair: Some((0, 2)), .. }), "{err}");
        let m = MatrixBuilder::new(WarpWindow::HalfWidth(1))
            .auto_widen(true)
            .build(&data)
            .unwrap();
        assert_eq!(m.len(), 3);
    }

    #[test]
    fn zero_workers_rejected() {
        assert!(build_matrix(&series(&[&[1.0]]), WarpWindow::Unlimited, 0).is_err());
    }

    #[test]
    fn save_load_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("d.txt");
        let m = DistanceMatrix::from_condensed(3, vec![0.1 + 0.2, 1.0 / 3.0, 2e-300]).unwrap();
        m.save(&path).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("p=3\n0,"));
        assert_eq!(DistanceMatrix::load(&path).unwrap(), m);
    }

    #[test]
    fn load_rejects_bad_files() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("d.txt");
        let cases = [
            ("p=2\n1,2\n2,0\n", 2),
            ("p=2\n0,2\n3,0\n", 3),
            ("p=2\n0,2\n", 3),
            ("p=2\n0,-1\n-1,0\n", 2),
            ("p=2\n0,x\nx,0\n", 2),
            ("q=2\n", 1),
        ];
        for (text, want_line) in cases {
            fs::write(&path, text).unwrap();
            match DistanceMatrix::load(&path) {
                Err(Error::FormatViolation { line, .. }) => assert_eq!(line, want_line, "{text:?}"),
                other => panic!("{text:?}: expected FormatViolation, got {other:?}"),
            }
        }
    }

    #[test]
    fn from_full_checks_symmetry() {
        assert!(DistanceMatrix::from_full(2, &[0.0, 1.0, 2.0, 0.0]).is_err());
        assert!(DistanceMatrix::from_full(2, &[0.0, 1.0, 1.0, 0.0]).is_ok());
    }
}
