//! On-demand, memoizing DTW distances for iterative clustering.

use std::collections::HashMap;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use crate::dtw::banded_cost;
use crate::error::{Error, Result};
use crate::matrix::{check_pairs, Distances};
use crate::series::{validate_dataset, TimeSeries, WarpWindow};

/// Computes a pair's DTW cost the first time it is requested and caches it
/// under the key `(min(i, j), max(i, j))`.
///
/// Safe to share between threads. Two threads asking for the same fresh pair
/// may both run the DP; only the first insertion is counted.
#[derive(Debug)]
pub struct LazyDistanceSource<'a> {
    dataset: &'a [TimeSeries],
    window: WarpWindow,
    auto_widen: bool,
    memo: Mutex<HashMap<(usize, usize), f64>>,
    computed: AtomicUsize,
}

impl<'a> LazyDistanceSource<'a> {
    /// Band feasibility is checked for every pair up front so later lookups
    /// cannot fail.
    pub fn new(dataset: &'a [TimeSeries], window: WarpWindow) -> Result<Self> {
        Self::with_auto_widen(dataset, window, false)
    }

    pub fn with_auto_widen(dataset: &'a [TimeSeries], window: WarpWindow, auto_widen: bool) -> Result<Self> {
        validate_dataset(dataset)?;
        if !auto_widen {
            check_pairs(dataset, window)?;
        }
        Ok(Self {
            dataset,
            window,
            auto_widen,
            memo: Mutex::new(HashMap::new()),
            computed: AtomicUsize::new(0),
        })
    }

    /// Number of distinct pairs computed so far.
    pub fn computed_pairs(&self) -> usize {
        self.computed.load(Ordering::Relaxed)
    }

    pub fn get(&self, i: usize, j: usize) -> Result<f64> {
        let p = self.dataset.len();
        for index in [i, j] {
            if index >= p {
                return Err(Error::IndexOutOfRange { index, len: p });
            }
        }
        Ok(self.lookup(i, j))
    }

    fn lookup(&self, i: usize, j: usize) -> f64 {
        if i == j {
            return 0.0;
        }
        let key = (i.min(j), i.max(j));
        if let Some(&v) = self.memo.lock().unwrap().get(&key) {
            return v;
        }

        let (x, y) = (self.dataset[key.0].samples(), self.dataset[key.1].samples());
        let window = if self.auto_widen {
            self.window.widened_for(x.len(), y.len())
        } else {
            self.window
        };
        let v = banded_cost(x, y, window.half_width_for(x.len(), y.len()));

        let mut memo = self.memo.lock().unwrap();
        *memo.entry(key).or_insert_with(|| {
            self.computed.fetch_add(1, Ordering::Relaxed);
            v
        })
    }
}

impl Distances for LazyDistanceSource<'_> {
    fn size(&self) -> usize {
        self.dataset.len()
    }

    fn distance(&self, i: usize, j: usize) -> f64 {
        let p = self.dataset.len();
        assert!(i < p && j < p, "index out of range for {p} series");
        self.lookup(i, j)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::build_matrix;

    fn data() -> Vec<TimeSeries> {
        [[0.0, 1.0, 2.0].as_slice(), &[1.0, 1.0], &[3.0, 2.0, 1.0, 0.0], &[5.0]]
            .iter()
            .enumerate()
            .map(|(i, s)| TimeSeries::new(format!("{i}"), s.to_vec()).unwrap())
            .collect()
    }

    #[test]
    fn diagonal_is_free() {
        let d = data();
        let src = LazyDistanceSource::new(&d, WarpWindow::Unlimited).unwrap();
        assert_eq!(src.get(2, 2).unwrap(), 0.0);
        assert_eq!(src.computed_pairs(), 0);
    }

    #[test]
    fn symmetric_lookup_counts_once() {
        let d = data();
        let src = LazyDistanceSource::new(&d, WarpWindow::Unlimited).unwrap();
        let a = src.get(0, 1).unwrap();
        let b = src.get(1, 0).unwrap();
        assert_eq!(a, b);
        assert_eq!(src.computed_pairs(), 1);
    }

    #[test]
    fn full_sweep_matches_matrix() {
        let d = data();
        let m = build_matrix(&d, WarpWindow::Unlimited, 2).unwrap();
        let src = LazyDistanceSource::new(&d, WarpWindow::Unlimited).unwrap();
        for i in 0..d.len() {
            for j in 0..d.len() {
                assert_eq!(src.get(i, j).unwrap(), m.get(i, j));
            }
        }
        assert_eq!(src.computed_pairs(), 6);
    }

    #[test]
    fn out_of_range() {
        let d = data();
        let src = LazyDistanceSource::new(&d, WarpWindow::Unlimited).unwrap();
        assert!(matches!(
            src.get(0, 4),
            Err(Error::IndexOutOfRange { index: 4, len: 4 })
        ));
    }

    #[test]
    fn infeasible_band_rejected_at_construction() {
        let d = data();
        assert!(matches!(
            LazyDistanceSource::new(&d, WarpWindow::HalfWidth(1)),
            Err(Error::BandInfeasible { .. })
        ));
        let src = LazyDistanceSource::with_auto_widen(&d, WarpWindow::HalfWidth(1), true).unwrap();
        assert!(src.get(2, 3).unwrap() > 0.0);
    }
}
