//! Dynamic time warping cost with an optional Sakoe-Chiba band.
//!
//! The per-cell cost is the squared sample difference and the reported
//! distance is the accumulated cost in the corner cell, with no square root.
//! [`dtw_distance`] keeps two rows of the cost matrix sized by the shorter
//! series; [`dtw_distance_with_path`] fills the whole matrix so the optimal
//! warping path can be traced back.

use crate::error::{Error, Result};
use crate::series::{check_samples, TimeSeries, WarpWindow};

/// Monotone, continuous alignment from (1, 1) to (n, m), 1-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WarpPath(Vec<(usize, usize)>);

impl WarpPath {
    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Sum of squared differences along the path.
    pub fn cost(&self, x: &[f64], y: &[f64]) -> f64 {
        self.0
            .iter()
            .map(|&(i, j)| {
                let d = x[i - 1] - y[j - 1];
                d * d
            })
            .sum()
    }

    /// True when the path satisfies the endpoint, step and coverage rules.
    pub fn is_admissible(&self, n: usize, m: usize) -> bool {
        let (Some(&first), Some(&last)) = (self.0.first(), self.0.last()) else {
            return false;
        };
        if first != (1, 1) || last != (n, m) {
            return false;
        }
        // Unit steps from (1,1) to (n,m) visit every row and column.
        self.0.windows(2).all(|w| {
            let step = (w[1].0.wrapping_sub(w[0].0), w[1].1.wrapping_sub(w[0].1));
            matches!(step, (1, 1) | (1, 0) | (0, 1))
        })
    }
}

pub(crate) fn check_band(n: usize, m: usize, window: WarpWindow) -> Result<usize> {
    let w = window.half_width_for(n, m);
    if w < n.abs_diff(m) {
        return Err(Error::BandInfeasible {
            half_width: w,
            n,
            m,
            pair: None,
        });
    }
    Ok(w)
}

/// DTW cost between two validated series.
pub fn dtw_distance(x: &TimeSeries, y: &TimeSeries, window: WarpWindow) -> Result<f64> {
    let w = check_band(x.len(), y.len(), window)?;
    Ok(banded_cost(x.samples(), y.samples(), w))
}

/// DTW cost between raw sample slices; validates the samples first.
pub fn dtw(x: &[f64], y: &[f64], window: WarpWindow) -> Result<f64> {
    check_samples("x", x)?;
    check_samples("y", y)?;
    let w = check_band(x.len(), y.len(), window)?;
    Ok(banded_cost(x, y, w))
}

/// Two-row DP. The shorter series runs along the row so the working set is
/// `2 * (min(n, m) + 1)` values. Caller guarantees `w >= |n - m|` and both
/// slices non-empty.
pub(crate) fn banded_cost(x: &[f64], y: &[f64], w: usize) -> f64 {
    let (outer, inner) = if x.len() >= y.len() { (x, y) } else { (y, x) };
    let m = inner.len();
    let mut prev = vec![f64::INFINITY; m + 1];
    let mut curr = vec![f64::INFINITY; m + 1];
    prev[0] = 0.0;

    for (row, &a) in outer.iter().enumerate() {
        let i = row + 1;
        let lo = i.saturating_sub(w).max(1);
        let hi = (i + w).min(m);
        // Cells outside [lo, hi] must read as unreachable from the next row.
        curr[lo - 1] = f64::INFINITY;
        let mut left = f64::INFINITY;
        let cells = curr[lo..=hi]
            .iter_mut()
            .zip(prev[lo - 1..=hi].windows(2))
            .zip(&inner[lo - 1..hi]);
        for ((c, up), &b) in cells {
            let d = a - b;
            left = d * d + up[0].min(up[1]).min(left);
            *c = left;
        }
        if hi < m {
            curr[hi + 1] = f64::INFINITY;
        }
        std::mem::swap(&mut prev, &mut curr);
    }
    prev[m]
}

/// Full-matrix DTW that also recovers the optimal path.
///
/// Ties between predecessors are broken diagonal first, then `(i-1, j)`,
/// then `(i, j-1)`. Uses O(n·m) memory; intended for inspection and tests.
pub fn dtw_distance_with_path(x: &TimeSeries, y: &TimeSeries, window: WarpWindow) -> Result<(f64, WarpPath)> {
    let w = check_band(x.len(), y.len(), window)?;
    Ok(full_matrix_path(x.samples(), y.samples(), w))
}

fn full_matrix_path(x: &[f64], y: &[f64], w: usize) -> (f64, WarpPath) {
    let (n, m) = (x.len(), y.len());
    let cols = m + 1;
    let mut c = vec![f64::INFINITY; (n + 1) * cols];
    c[0] = 0.0;
    for i in 1..=n {
        let lo = i.saturating_sub(w).max(1);
        let hi = (i + w).min(m);
        for j in lo..=hi {
            let d = x[i - 1] - y[j - 1];
            let best = c[(i - 1) * cols + j - 1]
                .min(c[(i - 1) * cols + j])
                .min(c[i * cols + j - 1]);
            c[i * cols + j] = d * d + best;
        }
    }

    let mut path = Vec::with_capacity(n + m);
    let (mut i, mut j) = (n, m);
    path.push((i, j));
    while (i, j) != (1, 1) {
        let diag = c[(i - 1) * cols + j - 1];
        let up = c[(i - 1) * cols + j];
        let left = c[i * cols + j - 1];
        if diag <= up && diag <= left {
            i -= 1;
            j -= 1;
        } else if up <= left {
            i -= 1;
        } else {
            j -= 1;
        }
        path.push((i, j));
    }
    path.reverse();
    (c[n * cols + m], WarpPath(path))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ts(v: &[f64]) -> TimeSeries {
        TimeSeries::new("t", v.to_vec()).unwrap()
    }

    #[test]
    fn identical_series_cost_zero() {
        assert_eq!(
            dtw(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0], WarpWindow::Unlimited).unwrap(),
            0.0
        );
    }

    #[test]
    fn single_samples() {
        assert_eq!(dtw(&[0.0], &[5.0], WarpWindow::Unlimited).unwrap(), 25.0);
        let (cost, path) = dtw_distance_with_path(&ts(&[0.0]), &ts(&[5.0]), WarpWindow::Unlimited).unwrap();
        assert_eq!(cost, 25.0);
        assert_eq!(path.pairs(), &[(1, 1)]);
    }

    #[test]
    fn one_to_many_mapping_is_free() {
        let x = ts(&[1.0, 2.0, 3.0]);
        let y = ts(&[1.0, 2.0, 2.0, 3.0]);
        assert_eq!(dtw_distance(&x, &y, WarpWindow::Unlimited).unwrap(), 0.0);
        let (cost, path) = dtw_distance_with_path(&x, &y, WarpWindow::Unlimited).unwrap();
        assert_eq!(cost, 0.0);
        assert!(path.pairs().contains(&(2, 2)));
        assert!(path.pairs().contains(&(2, 3)));
        assert!(path.is_admissible(3, 4));
    }

    #[test]
    fn zero_band_forces_diagonal() {
        let x = [0.0, 0.0, 0.0, 10.0];
        let y = [10.0, 0.0, 0.0, 0.0];
        // Forced pairs: (0-10)^2 + 0 + 0 + (10-0)^2.
        assert_eq!(dtw(&x, &y, WarpWindow::HalfWidth(0)).unwrap(), 200.0);
        // Both endpoints are forced, so widening cannot help here.
        assert_eq!(dtw(&x, &y, WarpWindow::Unlimited).unwrap(), 200.0);
    }

    #[test]
    fn diagonal_path_for_equal_series() {
        let (cost, path) = dtw_distance_with_path(&ts(&[1.0, 2.0]), &ts(&[1.0, 2.0]), WarpWindow::Unlimited).unwrap();
        assert_eq!(cost, 0.0);
        assert_eq!(path.pairs(), &[(1, 1), (2, 2)]);
    }

    #[test]
    fn infeasible_band_is_an_error() {
        let err = dtw(&[1.0, 2.0, 3.0], &[1.0], WarpWindow::HalfWidth(1)).unwrap_err();
        assert!(matches!(
            err,
            Error::BandInfeasible {
                half_width: 1,
                n: 3,
                m: 1,
                ..
            }
        ));
        assert!(dtw(&[1.0, 2.0, 3.0], &[1.0], WarpWindow::HalfWidth(2)).is_ok());
    }

    #[test]
    fn invalid_samples_rejected() {
        assert!(matches!(
            dtw(&[], &[1.0], WarpWindow::Unlimited),
            Err(Error::InvalidSeries { .. })
        ));
        assert!(matches!(
            dtw(&[f64::NAN], &[1.0], WarpWindow::Unlimited),
            Err(Error::InvalidSeries { .. })
        ));
    }

    #[test]
    fn tie_break_prefers_diagonal_then_vertical() {
        // All-equal samples make every predecessor tie at zero.
        let (_, path) = dtw_distance_with_path(&ts(&[1.0; 3]), &ts(&[1.0; 5]), WarpWindow::Unlimited).unwrap();
        assert_eq!(path.pairs(), &[(1, 1), (1, 2), (1, 3), (2, 4), (3, 5)]);
        let (_, path) = dtw_distance_with_path(&ts(&[1.0; 4]), &ts(&[1.0; 2]), WarpWindow::Unlimited).unwrap();
        assert_eq!(path.pairs(), &[(1, 1), (2, 1), (3, 1), (4, 2)]);
    }
}
