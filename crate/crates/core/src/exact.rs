//! Exact k-medoid clustering by branch-and-bound.
//!
//! The integer program picks `k` centroids on the diagonal of a binary
//! assignment matrix and puts exactly one 1 in every column. Once the
//! centroid set is fixed the best assignment is nearest-centroid, so the
//! search only branches on which series are centroids (include / exclude)
//! and prices each leaf directly.
//!
//! A node is a set of included candidates `C`, a list of undecided
//! candidates `U` and `r = k - |C|` free slots. With `aⱼ` the distance from
//! `j` to its nearest member of `C`, two lower bounds are taken:
//!
//! * savings: opening `u` saves at most `Σⱼ max(0, aⱼ - d(u, j))`, and the
//!   savings of a set are at most the sum of the individual savings;
//! * partition: the series are split into groups (the clusters of the
//!   incumbent). Within a group every undecided candidate from another group
//!   is opened for free, so the group's cost with `t` of its own candidates
//!   opened is bounded by savings and by nearest-neighbour coverage alone.
//!   The free slots are then spread across groups by a small knapsack.
//!
//! On well separated data the partition bound is close to the optimum at
//! the root, which is what keeps the tree small.
//!
//! The search runs twice. The first pass walks candidates by ascending row
//! sum and finds the optimal cost. The second walks them in index order and
//! stops at the first set with that cost, which is the lexicographically
//! smallest optimal medoid set.

use crate::cluster::{assign_nearest, Certificate, ClusterResult};
use crate::error::{Error, Result};
use crate::kmedoids::{kmedoids, KMedoidsConfig};
use crate::matrix::DistanceMatrix;

pub const DEFAULT_NODE_LIMIT: u64 = 50_000_000;

#[derive(Debug, Clone, Copy)]
pub struct ExactSolver {
    node_limit: u64,
}

impl Default for ExactSolver {
    fn default() -> Self {
        Self {
            node_limit: DEFAULT_NODE_LIMIT,
        }
    }
}

/// Solve with the default node budget.
pub fn solve_exact(d: &DistanceMatrix, k: usize) -> Result<ClusterResult> {
    ExactSolver::default().solve(d, k)
}

impl ExactSolver {
    /// Past this many nodes the solver gives up and returns its incumbent
    /// with [`Certificate::LocalHeuristic`].
    pub fn with_node_limit(node_limit: u64) -> Self {
        Self { node_limit }
    }

    pub fn solve(&self, d: &DistanceMatrix, k: usize) -> Result<ClusterResult> {
        let p = d.len();
        if k == 0 || k > p {
            return Err(Error::KOutOfRange { k, p });
        }
        if k == p {
            return Ok(ClusterResult {
                medoids: (0..p).collect(),
                assignment: (0..p).collect(),
                total_cost: 0.0,
                certificate: Certificate::GlobalOptimal,
                nodes_explored: Some(0),
            });
        }

        let incumbent = kmedoids(d, &KMedoidsConfig::new(k))?;
        let row_sums = d.row_sums();
        let mut by_row_sum: Vec<usize> = (0..p).collect();
        by_row_sum.sort_by(|&a, &b| row_sums[a].total_cmp(&row_sums[b]).then(a.cmp(&b)));

        let groups = incumbent.clusters();
        let mut group_of = vec![0; p];
        for (g, members) in groups.iter().enumerate() {
            for &j in members {
                group_of[j] = g;
            }
        }
        let mut search = Search {
            full: d.to_full(),
            groups,
            group_of,
            p,
            k,
            node_limit: self.node_limit,
            nodes: 0,
            mode: Mode::Minimize,
            best_cost: incumbent.total_cost,
            best_set: incumbent.medoids.clone(),
            slack: 1e-9 * incumbent.total_cost.max(1.0),
        };

        // Pass 1: optimal cost.
        let aborted = search.run(&by_row_sum) == Flow::Abort;
        if aborted {
            let (assignment, total_cost) = assign_nearest(d, &search.best_set);
            return Ok(ClusterResult {
                medoids: search.best_set,
                assignment,
                total_cost,
                certificate: Certificate::LocalHeuristic,
                nodes_explored: Some(search.nodes),
            });
        }

        // Pass 2: lowest-index set achieving it. If the budget runs out here
        // the cost is still proven optimal; only the tie-break is lost.
        let index_order: Vec<usize> = (0..p).collect();
        search.mode = Mode::FirstAtMost(search.best_cost);
        search.run(&index_order);

        let (assignment, total_cost) = assign_nearest(d, &search.best_set);
        Ok(ClusterResult {
            medoids: search.best_set,
            assignment,
            total_cost,
            certificate: Certificate::GlobalOptimal,
            nodes_explored: Some(search.nodes),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Mode {
    /// Find any set cheaper than the incumbent, keep the cheapest.
    Minimize,
    /// Stop at the first set whose cost does not exceed the target.
    FirstAtMost(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Flow {
    Continue,
    Stop,
    Abort,
}

struct Search {
    full: Vec<f64>,
    /// Fixed partition of the series used by the partition bound.
    groups: Vec<Vec<usize>>,
    group_of: Vec<usize>,
    p: usize,
    k: usize,
    node_limit: u64,
    nodes: u64,
    mode: Mode,
    best_cost: f64,
    best_set: Vec<usize>,
    /// Absolute allowance for rounding in the bound arithmetic.
    slack: f64,
}

impl Search {
    fn row(&self, i: usize) -> &[f64] {
        &self.full[i * self.p..(i + 1) * self.p]
    }

    fn run(&mut self, order: &[usize]) -> Flow {
        let mut chosen = Vec::with_capacity(self.k);
        let nearest = vec![f64::INFINITY; self.p];
        self.branch(order, 0, &mut chosen, &nearest)
    }

    /// Explore every completion of `chosen` using candidates `order[start..]`.
    /// `nearest[j]` is the distance from `j` to its closest chosen medoid.
    fn branch(&mut self, order: &[usize], start: usize, chosen: &mut Vec<usize>, nearest: &[f64]) -> Flow {
        for pos in start..order.len() {
            self.nodes += 1;
            if self.nodes > self.node_limit {
                return Flow::Abort;
            }
            let free = self.k - chosen.len();
            let undecided = &order[pos..];
            if undecided.len() < free {
                return Flow::Continue;
            }
            if undecided.len() == free {
                let mut cand = nearest.to_vec();
                for &u in undecided {
                    self.tighten(&mut cand, u);
                }
                let len = chosen.len();
                chosen.extend_from_slice(undecided);
                let flow = self.leaf(chosen, &cand);
                chosen.truncate(len);
                return flow;
            }
            if self.prune(self.lower_bound(nearest, chosen, undecided, free)) {
                return Flow::Continue;
            }

            let u = order[pos];
            let mut with_u = nearest.to_vec();
            self.tighten(&mut with_u, u);
            chosen.push(u);
            let flow = if chosen.len() == self.k {
                self.leaf(chosen, &with_u)
            } else {
                self.branch(order, pos + 1, chosen, &with_u)
            };
            chosen.pop();
            if flow != Flow::Continue {
                return flow;
            }
        }
        Flow::Continue
    }

    fn tighten(&self, nearest: &mut [f64], u: usize) {
        for (a, &d) in nearest.iter_mut().zip(self.row(u)) {
            if d < *a {
                *a = d;
            }
        }
    }

    fn prune(&self, bound: f64) -> bool {
        match self.mode {
            Mode::Minimize => bound - self.slack >= self.best_cost,
            Mode::FirstAtMost(target) => bound - self.slack > target,
        }
    }

    fn leaf(&mut self, chosen: &[usize], nearest: &[f64]) -> Flow {
        let cost: f64 = nearest.iter().sum();
        match self.mode {
            Mode::Minimize => {
                if cost < self.best_cost {
                    self.best_cost = cost;
                    self.best_set = sorted(chosen);
                }
                Flow::Continue
            }
            Mode::FirstAtMost(target) => {
                if cost <= target {
                    self.best_cost = cost;
                    self.best_set = sorted(chosen);
                    Flow::Stop
                } else {
                    Flow::Continue
                }
            }
        }
    }

    fn lower_bound(&self, nearest: &[f64], chosen: &[usize], undecided: &[usize], free: usize) -> f64 {
        let partition = self.partition_bound(nearest, undecided, free);
        if chosen.is_empty() {
            return partition;
        }
        let base: f64 = nearest.iter().sum();
        let mut savings: Vec<f64> = undecided.iter().map(|&u| self.savings(nearest, u, 0..self.p)).collect();
        partition.max(base - top_sum(&mut savings, free))
    }

    /// What opening `u` saves over `nearest` on the given series.
    fn savings(&self, nearest: &[f64], u: usize, over: impl IntoIterator<Item = usize>) -> f64 {
        let row = self.row(u);
        over.into_iter()
            .map(|j| if row[j] < nearest[j] { nearest[j] - row[j] } else { 0.0 })
            .sum()
    }

    /// Bounds each group of the partition separately, then splits the free
    /// slots between groups as cheaply as possible.
    fn partition_bound(&self, nearest: &[f64], undecided: &[usize], free: usize) -> f64 {
        let p = self.p;
        let mut in_u = vec![false; p];
        for &u in undecided {
            in_u[u] = true;
        }

        let mut best = vec![f64::INFINITY; free + 1];
        best[0] = 0.0;
        for (g, members) in self.groups.iter().enumerate() {
            let inside: Vec<usize> = undecided.iter().copied().filter(|&u| self.group_of[u] == g).collect();
            // Undecided series outside the group are all opened for free.
            let mut base = nearest.to_vec();
            for &u in undecided.iter().filter(|&&u| self.group_of[u] != g) {
                for &j in members {
                    base[j] = base[j].min(self.full[u * p + j]);
                }
            }
            let zero: f64 = members.iter().map(|&j| base[j]).sum();

            // Savings side: opening t members saves at most the top t
            // individual savings.
            let mut savings: Vec<f64> = inside
                .iter()
                .map(|&u| self.savings(&base, u, members.iter().copied()))
                .collect();
            savings.sort_unstable_by(|a, b| b.total_cmp(a));

            // Coverage side: members pay their nearest open candidate other
            // than themselves, except opened members which pay nothing.
            let mut rest = 0.0;
            let mut opened = Vec::with_capacity(inside.len());
            for &j in members {
                let c = inside
                    .iter()
                    .filter(|&&u| u != j)
                    .fold(base[j], |c, &u| c.min(self.full[u * p + j]));
                if in_u[j] {
                    opened.push(c);
                } else {
                    rest += c;
                }
            }
            opened.sort_unstable_by(|a, b| b.total_cmp(a));
            let mut tail = vec![rest; opened.len() + 1];
            for i in (0..opened.len()).rev() {
                tail[i] = tail[i + 1] + opened[i];
            }

            let mut row = Vec::with_capacity(free + 1);
            let mut saved = 0.0;
            for t in 0..=free {
                if t > 0 {
                    saved += savings.get(t - 1).copied().unwrap_or(0.0);
                }
                let by_savings = if zero.is_finite() {
                    zero - saved
                } else {
                    f64::NEG_INFINITY
                };
                row.push(by_savings.max(tail[t.min(opened.len())]));
            }

            let mut next = vec![f64::INFINITY; free + 1];
            for (used, &b) in best.iter().enumerate() {
                if b.is_infinite() {
                    continue;
                }
                for (t, &v) in row.iter().enumerate().take(free - used + 1) {
                    next[used + t] = next[used + t].min(b + v);
                }
            }
            best = next;
        }
        best.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// Sum of the `r` largest values.
fn top_sum(values: &mut [f64], r: usize) -> f64 {
    if r == 0 {
        return 0.0;
    }
    if r >= values.len() {
        return values.iter().sum();
    }
    let split = values.len() - r;
    values.select_nth_unstable_by(split, |a, b| a.total_cmp(b));
    values[split..].iter().sum()
}

fn sorted(set: &[usize]) -> Vec<usize> {
    let mut v = set.to_vec();
    v.sort_unstable();
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cluster::validate_assignment;

    fn line(points: &[f64]) -> DistanceMatrix {
        let p = points.len();
        let v = (0..p)
            .flat_map(|i| (i + 1..p).map(move |j| (i, j)))
            .map(|(i, j)| (points[i] - points[j]).abs())
            .collect();
        DistanceMatrix::from_condensed(p, v).unwrap()
    }

    #[test]
    fn k_equals_p_gives_identity() {
        let d = line(&[3.0, 1.0, 4.0, 1.5]);
        let r = solve_exact(&d, 4).unwrap();
        assert_eq!(r.total_cost, 0.0);
        assert_eq!(r.assignment, vec![0, 1, 2, 3]);
        assert!(validate_assignment(&r.assignment_matrix(), 4).is_empty());
    }

    #[test]
    fn k_one_is_row_sum_argmin() {
        let d = line(&[0.0, 4.0, 5.0, 6.0, 30.0]);
        let r = solve_exact(&d, 1).unwrap();
        let sums = d.row_sums();
        assert_eq!(r.medoids, vec![2]);
        assert_eq!(r.total_cost, sums[2]);
        assert_eq!(r.certificate, Certificate::GlobalOptimal);
    }

    #[test]
    fn two_groups_on_a_line() {
        let d = line(&[0.0, 1.0, 2.0, 100.0, 101.0, 102.0, 103.0]);
        let r = solve_exact(&d, 2).unwrap();
        assert_eq!(r.medoids, vec![1, 4]);
        assert_eq!(r.total_cost, 2.0 + 1.0 + 1.0 + 2.0);
        assert_eq!(r.assignment, vec![1, 1, 1, 4, 4, 4, 4]);
    }

    #[test]
    fn all_ties_pick_lowest_indices() {
        let d = DistanceMatrix::from_condensed(6, vec![1.0; 15]).unwrap();
        let r = solve_exact(&d, 3).unwrap();
        assert_eq!(r.medoids, vec![0, 1, 2]);
        assert_eq!(r.assignment, vec![0, 1, 2, 0, 0, 0]);
        assert_eq!(r.total_cost, 3.0);
    }

    #[test]
    fn k_out_of_range() {
        let d = line(&[0.0, 1.0]);
        assert!(matches!(solve_exact(&d, 0), Err(Error::KOutOfRange { k: 0, p: 2 })));
        assert!(matches!(solve_exact(&d, 3), Err(Error::KOutOfRange { k: 3, p: 2 })));
    }

    #[test]
    fn tiny_budget_degrades_to_heuristic() {
        let points: Vec<f64> = (0..30).map(|i| ((i * 37) % 101) as f64).collect();
        let d = line(&points);
        let r = ExactSolver::with_node_limit(3).solve(&d, 4).unwrap();
        assert_eq!(r.certificate, Certificate::LocalHeuristic);
        assert_eq!(r.medoids.len(), 4);
        let full = solve_exact(&d, 4).unwrap();
        assert!(full.total_cost <= r.total_cost);
    }

    #[test]
    fn top_sum_picks_largest() {
        assert_eq!(top_sum(&mut [3.0, 1.0, 2.0, 5.0], 2), 8.0);
        assert_eq!(top_sum(&mut [3.0, 1.0], 5), 4.0);
        assert_eq!(top_sum(&mut [3.0, 1.0], 0), 0.0);
    }
}
