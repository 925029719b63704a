//! Lloyd-style k-medoids with seeded restarts.
//!
//! Each restart alternates nearest-medoid assignment with a per-cluster
//! medoid update until the medoid set stops changing. Distances are pulled
//! through [`Distances`], so a [`LazyDistanceSource`](crate::LazyDistanceSource)
//! only ever evaluates the pairs the iterations touch.
//!
//! Randomness comes from ChaCha8 seeded with `seed`; restart `r` draws from
//! stream `r` of that generator, so any restart can be replayed on its own.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::cluster::{assign_nearest, Certificate, ClusterResult};
use crate::error::{Error, Result};
use crate::matrix::Distances;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KMedoidsConfig {
    pub k: usize,
    pub restarts: usize,
    pub max_iterations: usize,
    pub seed: u64,
}

impl KMedoidsConfig {
    pub fn new(k: usize) -> Self {
        Self {
            k,
            restarts: 10,
            max_iterations: 100,
            seed: 0,
        }
    }

    pub fn with_restarts(mut self, restarts: usize) -> Self {
        self.restarts = restarts;
        self
    }

    pub fn with_max_iterations(mut self, max_iterations: usize) -> Self {
        self.max_iterations = max_iterations;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    fn validate(&self, p: usize) -> Result<()> {
        if self.k == 0 || self.k > p {
            return Err(Error::KOutOfRange { k: self.k, p });
        }
        if self.restarts == 0 {
            return Err(Error::Config("restarts must be at least 1".into()));
        }
        if self.max_iterations == 0 {
            return Err(Error::Config("max_iterations must be at least 1".into()));
        }
        Ok(())
    }
}

/// One restart's result plus the cost observed after every assignment step.
#[derive(Debug, Clone)]
pub struct RestartOutcome {
    pub result: ClusterResult,
    pub cost_trace: Vec<f64>,
    pub converged: bool,
}

/// Best of `cfg.restarts` independent runs. Ties in cost go to the lower
/// restart index.
pub fn kmedoids(d: &(impl Distances + ?Sized), cfg: &KMedoidsConfig) -> Result<ClusterResult> {
    cfg.validate(d.size())?;
    let outcomes: Vec<RestartOutcome> = (0..cfg.restarts)
        .into_par_iter()
        .map(|r| run_restart(d, cfg, r))
        .collect();

    let mut best = 0;
    for (r, o) in outcomes.iter().enumerate().skip(1) {
        if o.result.total_cost < outcomes[best].result.total_cost {
            best = r;
        }
    }
    Ok(outcomes.into_iter().nth(best).unwrap().result)
}

/// Run restart number `restart` alone.
pub fn kmedoids_restart(d: &(impl Distances + ?Sized), cfg: &KMedoidsConfig, restart: usize) -> Result<RestartOutcome> {
    cfg.validate(d.size())?;
    Ok(run_restart(d, cfg, restart))
}

fn run_restart(d: &(impl Distances + ?Sized), cfg: &KMedoidsConfig, restart: usize) -> RestartOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(restart as u64);

    let mut medoids = spread_seeding(d, cfg.k, &mut rng);
    let mut cost_trace = Vec::new();
    let mut converged = false;

    for _ in 0..cfg.max_iterations {
        let (assignment, cost) = assign_nearest(d, &medoids);
        cost_trace.push(cost);
        let updated = update_medoids(d, &medoids, &assignment);
        if updated == medoids {
            converged = true;
            break;
        }
        medoids = updated;
    }

    let (assignment, total_cost) = assign_nearest(d, &medoids);
    RestartOutcome {
        result: ClusterResult {
            medoids,
            assignment,
            total_cost,
            certificate: Certificate::LocalHeuristic,
            nodes_explored: None,
        },
        cost_trace,
        converged,
    }
}

/// First medoid uniform; each next one drawn with probability proportional
/// to its distance from the nearest medoid already chosen.
fn spread_seeding(d: &(impl Distances + ?Sized), k: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let p = d.size();
    let mut chosen = vec![false; p];
    let first = rng.random_range(0..p);
    chosen[first] = true;
    let mut medoids = vec![first];
    let mut nearest: Vec<f64> = (0..p).map(|j| d.distance(first, j)).collect();

    while medoids.len() < k {
        let total: f64 = (0..p).filter(|&j| !chosen[j]).map(|j| nearest[j]).sum();
        let pick = if total > 0.0 {
            let target = rng.random::<f64>() * total;
            let mut acc = 0.0;
            let mut pick = None;
            for j in (0..p).filter(|&j| !chosen[j] && nearest[j] > 0.0) {
                acc += nearest[j];
                pick = Some(j);
                if acc > target {
                    break;
                }
            }
            pick.unwrap()
        } else {
            let free: Vec<usize> = (0..p).filter(|&j| !chosen[j]).collect();
            free[rng.random_range(0..free.len())]
        };
        chosen[pick] = true;
        medoids.push(pick);
        for j in 0..p {
            if !chosen[j] {
                nearest[j] = nearest[j].min(d.distance(pick, j));
            }
        }
    }
    medoids.sort_unstable();
    medoids
}

/// Within each cluster pick the member with the smallest summed distance to
/// the other members; ties go to the lowest index.
fn update_medoids(d: &(impl Distances + ?Sized), medoids: &[usize], assignment: &[usize]) -> Vec<usize> {
    let mut updated: Vec<usize> = medoids
        .iter()
        .map(|&m| {
            let members: Vec<usize> = (0..assignment.len()).filter(|&j| assignment[j] == m).collect();
            let mut best = m;
            let mut best_sum = f64::INFINITY;
            for &c in &members {
                let sum: f64 = members.iter().map(|&u| d.distance(c, u)).sum();
                if sum < best_sum || (sum == best_sum && c < best) {
                    best = c;
                    best_sum = sum;
                }
            }
            best
        })
        .collect();
    updated.sort_unstable();
    updated
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::DistanceMatrix;

    fn line(points: &[f64]) -> DistanceMatrix {
        let p = points.len();
        let v = (0..p)
            .flat_map(|i| (i + 1..p).map(move |j| (i, j)))
            .map(|(i, j)| (points[i] - points[j]).abs())
            .collect();
        DistanceMatrix::from_condensed(p, v).unwrap()
    }

    #[test]
    fn k_equals_p_is_free() {
        let d = line(&[0.0, 1.0, 5.0, 9.0]);
        let r = kmedoids(&d, &KMedoidsConfig::new(4)).unwrap();
        assert_eq!(r.total_cost, 0.0);
        assert_eq!(r.medoids, vec![0, 1, 2, 3]);
        assert_eq!(r.assignment, vec![0, 1, 2, 3]);
        assert_eq!(r.certificate, Certificate::LocalHeuristic);
    }

    #[test]
    fn k_one_picks_row_sum_argmin() {
        let d = line(&[0.0, 1.0, 2.0, 10.0, 3.0]);
        let r = kmedoids(&d, &KMedoidsConfig::new(1).with_restarts(3)).unwrap();
        assert_eq!(r.medoids, vec![2]);
        let sums = d.row_sums();
        assert_eq!(r.total_cost, sums[2]);
    }

    #[test]
    fn k_one_tie_goes_to_lowest_index() {
        let d = DistanceMatrix::from_condensed(2, vec![5.0]).unwrap();
        for seed in 0..8 {
            let r = kmedoids(&d, &KMedoidsConfig::new(1).with_seed(seed)).unwrap();
            assert_eq!(r.medoids, vec![0]);
            assert_eq!(r.total_cost, 5.0);
        }
    }

    #[test]
    fn bad_config_rejected() {
        let d = line(&[0.0, 1.0]);
        assert!(matches!(
            kmedoids(&d, &KMedoidsConfig::new(3)),
            Err(Error::KOutOfRange { k: 3, p: 2 })
        ));
        assert!(matches!(
            kmedoids(&d, &KMedoidsConfig::new(0)),
            Err(Error::KOutOfRange { .. })
        ));
        assert!(kmedoids(&d, &KMedoidsConfig::new(1).with_restarts(0)).is_err());
        assert!(kmedoids(&d, &KMedoidsConfig::new(1).with_max_iterations(0)).is_err());
    }

    #[test]
    fn duplicates_keep_every_cluster_alive() {
        let d = line(&[1.0, 1.0, 1.0, 1.0, 8.0]);
        let r = kmedoids(&d, &KMedoidsConfig::new(3)).unwrap();
        assert_eq!(r.medoids.len(), 3);
        for &m in &r.medoids {
            assert_eq!(r.assignment[m], m);
        }
        assert_eq!(r.total_cost, 0.0);
    }

    #[test]
    fn restart_is_replayable() {
        let d = line(&[0.0, 1.0, 2.0, 7.0, 8.0, 9.0, 20.0, 21.0]);
        let cfg = KMedoidsConfig::new(3).with_seed(11).with_restarts(4);
        let whole = kmedoids(&d, &cfg).unwrap();
        let best = (0..4)
            .map(|r| kmedoids_restart(&d, &cfg, r).unwrap().result)
            .reduce(|a, b| if b.total_cost < a.total_cost { b } else { a })
            .unwrap();
        assert_eq!(whole, best);
    }
}
