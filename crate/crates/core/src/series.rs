//! Time series and warping-window types.

use std::collections::HashSet;

use crate::error::{Error, Result};

/// One non-empty sequence of finite samples with an identifier.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    id: String,
    samples: Vec<f64>,
}

impl TimeSeries {
    pub fn new(id: impl Into<String>, samples: Vec<f64>) -> Result<Self> {
        let id = id.into();
        check_samples(&id, &samples)?;
        Ok(Self { id, samples })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    /// Always false; kept for API symmetry with `len`.
    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Z-score the samples in place. A constant series becomes all zeros.
    pub fn normalize(&mut self) {
        let n = self.samples.len() as f64;
        let mean = self.samples.iter().sum::<f64>() / n;
        let var = self.samples.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
        let sd = var.sqrt();
        for v in &mut self.samples {
            *v = if sd > 0.0 { (*v - mean) / sd } else { 0.0 };
        }
    }
}

pub(crate) fn check_samples(id: &str, samples: &[f64]) -> Result<()> {
    if samples.is_empty() {
        return Err(Error::InvalidSeries {
            id: id.to_string(),
            reason: "series is empty".into(),
        });
    }
    if let Some(pos) = samples.iter().position(|v| !v.is_finite()) {
        return Err(Error::InvalidSeries {
            id: id.to_string(),
            reason: format!("sample {} is not finite", pos + 1),
        });
    }
    Ok(())
}

/// Check that a dataset is non-empty and its ids are unique.
pub fn validate_dataset(dataset: &[TimeSeries]) -> Result<()> {
    if dataset.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let mut seen = HashSet::with_capacity(dataset.len());
    for s in dataset {
        if !seen.insert(s.id()) {
            return Err(Error::DuplicateId(s.id().to_string()));
        }
    }
    Ok(())
}

/// Sakoe-Chiba band: a cell (i, j) is admissible when |i - j| <= half_width.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum WarpWindow {
    #[default]
    Unlimited,
    HalfWidth(usize),
}

impl WarpWindow {
    /// Half-width that applies to a pair of lengths `n` and `m`.
    pub fn half_width_for(self, n: usize, m: usize) -> usize {
        match self {
            WarpWindow::Unlimited => n.max(m),
            WarpWindow::HalfWidth(w) => w,
        }
    }

    pub fn is_feasible(self, n: usize, m: usize) -> bool {
        self.half_width_for(n, m) >= n.abs_diff(m)
    }

    /// Widen a bounded window to `|n - m|` when it would otherwise be infeasible.
    pub fn widened_for(self, n: usize, m: usize) -> WarpWindow {
        match self {
            WarpWindow::HalfWidth(w) => WarpWindow::HalfWidth(w.max(n.abs_diff(m))),
            WarpWindow::Unlimited => WarpWindow::Unlimited,
        }
    }
}

impl std::fmt::Display for WarpWindow {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            WarpWindow::Unlimited => f.write_str("unlimited"),
            WarpWindow::HalfWidth(w) => write!(f, "{w}"),
        }
    }
}

impl std::str::FromStr for WarpWindow {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.eq_ignore_ascii_case("unlimited") {
            return Ok(WarpWindow::Unlimited);
        }
        s.parse::<usize>().map(WarpWindow::HalfWidth).map_err(|_| {
            Error::Config(format!(
                "window must be a non-negative integer or `unlimited`, got `{s}`"
            ))
        })
    }
}
