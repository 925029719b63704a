//! Exhaustive reference solvers for small instances.
//!
//! Both enumerate every candidate solution explicitly and share no code
//! with the dynamic program or the branch-and-bound search.

use crate::cluster::{Certificate, ClusterResult};
use crate::error::{Error, Result};
use crate::matrix::DistanceMatrix;
use crate::series::WarpWindow;

/// Largest `n·m` accepted by [`dtw_brute_force`].
pub const MAX_DTW_CELLS: usize = 64;

/// Largest number of medoid subsets accepted by [`enumerate_exact`].
pub const MAX_SUBSETS: u128 = 1_000_000;

/// Minimum warping-path cost over every admissible path.
pub fn dtw_brute_force(x: &[f64], y: &[f64], window: WarpWindow) -> Result<f64> {
    let (n, m) = (x.len(), y.len());
    if n == 0 || m == 0 {
        return Err(Error::InvalidSeries {
            id: if n == 0 { "x" } else { "y" }.into(),
            reason: "series is empty".into(),
        });
    }
    if n * m > MAX_DTW_CELLS {
        return Err(Error::InstanceTooLarge(format!(
            "{n}×{m} grid exceeds {MAX_DTW_CELLS} cells"
        )));
    }
    let w = window.half_width_for(n, m);
    if w < n.abs_diff(m) {
        return Err(Error::BandInfeasible {
            half_width: w,
            n,
            m,
            pair: None,
        });
    }

    fn walk(x: &[f64], y: &[f64], w: usize, i: usize, j: usize, acc: f64, best: &mut f64) {
        if i.abs_diff(j) > w {
            return;
        }
        let d = x[i] - y[j];
        let acc = acc + d * d;
        if i == x.len() - 1 && j == y.len() - 1 {
            *best = best.min(acc);
            return;
        }
        if i + 1 < x.len() && j + 1 < y.len() {
            walk(x, y, w, i + 1, j + 1, acc, best);
        }
        if i + 1 < x.len() {
            walk(x, y, w, i + 1, j, acc, best);
        }
        if j + 1 < y.len() {
            walk(x, y, w, i, j + 1, acc, best);
        }
    }

    let mut best = f64::INFINITY;
    walk(x, y, w, 0, 0, 0.0, &mut best);
    Ok(best)
}

fn binomial(n: usize, k: usize) -> u128 {
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Try every `k`-subset as the medoid set in lexicographic order and keep
/// the first one of minimal cost.
pub fn enumerate_exact(d: &DistanceMatrix, k: usize) -> Result<ClusterResult> {
    let p = d.len();
    if k == 0 || k > p {
        return Err(Error::KOutOfRange { k, p });
    }
    let subsets = binomial(p, k);
    if subsets > MAX_SUBSETS {
        return Err(Error::InstanceTooLarge(format!(
            "C({p},{k}) = {subsets} subsets exceeds {MAX_SUBSETS}"
        )));
    }

    let cost_of = |set: &[usize]| -> f64 {
        (0..p)
            .map(|j| set.iter().map(|&i| d.get(i, j)).fold(f64::INFINITY, f64::min))
            .sum()
    };

    let mut set: Vec<usize> = (0..k).collect();
    let mut best_set = set.clone();
    let mut best_cost = cost_of(&set);
    loop {
        // Advance to the next combination.
        let mut i = k;
        while i > 0 && set[i - 1] == p - k + i - 1 {
            i -= 1;
        }
        if i == 0 {
            break;
        }
        set[i - 1] += 1;
        for t in i..k {
            set[t] = set[t - 1] + 1;
        }
        let c = cost_of(&set);
        if c < best_cost {
            best_cost = c;
            best_set = set.clone();
        }
    }

    let assignment = (0..p)
        .map(|j| {
            if best_set.contains(&j) {
                return j;
            }
            let mut best = best_set[0];
            for &m in &best_set[1..] {
                if d.get(m, j) < d.get(best, j) {
                    best = m;
                }
            }
            best
        })
        .collect();

    Ok(ClusterResult {
        medoids: best_set,
        assignment,
        total_cost: best_cost,
        certificate: Certificate::GlobalOptimal,
        nodes_explored: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dtw_oracle_small_cases() {
        assert_eq!(
            dtw_brute_force(&[0.0, 0.0], &[1.0, 1.0], WarpWindow::Unlimited).unwrap(),
            2.0
        );
        assert_eq!(dtw_brute_force(&[7.0], &[7.0], WarpWindow::Unlimited).unwrap(), 0.0);
        assert_eq!(
            dtw_brute_force(&[1.0, 2.0, 3.0], &[1.0, 2.0, 2.0, 3.0], WarpWindow::Unlimited).unwrap(),
            0.0
        );
        assert_eq!(
            dtw_brute_force(&[0.0, 0.0, 0.0, 10.0], &[10.0, 0.0, 0.0, 0.0], WarpWindow::HalfWidth(0)).unwrap(),
            200.0
        );
    }

    #[test]
    fn dtw_oracle_guards() {
        assert!(matches!(
            dtw_brute_force(&[0.0; 9], &[0.0; 8], WarpWindow::Unlimited),
            Err(Error::InstanceTooLarge(_))
        ));
        assert!(dtw_brute_force(&[0.0; 8], &[0.0; 8], WarpWindow::Unlimited).is_ok());
        assert!(matches!(
            dtw_brute_force(&[0.0; 3], &[0.0], WarpWindow::HalfWidth(1)),
            Err(Error::BandInfeasible { .. })
        ));
    }

    #[test]
    fn subset_oracle_small_cases() {
        let d = DistanceMatrix::from_condensed(4, vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]).unwrap();
        assert_eq!(enumerate_exact(&d, 4).unwrap().total_cost, 0.0);

        let d = DistanceMatrix::from_condensed(2, vec![5.0]).unwrap();
        let r = enumerate_exact(&d, 1).unwrap();
        assert_eq!(r.total_cost, 5.0);
        assert_eq!(r.medoids, vec![0]);
        assert_eq!(r.assignment, vec![0, 0]);
    }

    #[test]
    fn subset_oracle_guard() {
        let d = DistanceMatrix::from_condensed(40, vec![1.0; 780]).unwrap();
        assert!(matches!(enumerate_exact(&d, 20), Err(Error::InstanceTooLarge(_))));
        assert_eq!(binomial(6, 2), 15);
        assert_eq!(binomial(40, 20), 137_846_528_820);
    }
}
