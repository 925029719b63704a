//! Silhouette scores and the cost-versus-k curve.

use rayon::prelude::*;

use crate::cluster::ClusterResult;
use crate::error::{Error, Result};
use crate::exact::ExactSolver;
use crate::kmedoids::{kmedoids, KMedoidsConfig};
use crate::matrix::DistanceMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Exact,
    KMedoids,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Exact => "exact",
            Method::KMedoids => "kmedoids",
        }
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Method::Exact),
            "kmedoids" => Ok(Method::KMedoids),
            other => Err(Error::Config(format!(
                "unknown method `{other}`, expected exact or kmedoids"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Silhouette {
    pub per_series: Vec<f64>,
    pub mean: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScoreReport {
    pub silhouette: Option<Silhouette>,
    pub elbow: Vec<(usize, f64)>,
}

/// Standard silhouette over the DTW distance matrix.
///
/// `a` is the mean distance to the rest of the series' own cluster, `b` the
/// smallest mean distance to another cluster, and `s = (b - a) / max(a, b)`.
/// Members of singleton clusters score 0, as does any series with
/// `a = b = 0`.
pub fn silhouette(d: &DistanceMatrix, result: &ClusterResult) -> Result<Silhouette> {
    let p = d.len();
    if result.assignment.len() != p {
        return Err(Error::Config(format!(
            "result covers {} series but the matrix has {p}",
            result.assignment.len()
        )));
    }
    if result.k() < 2 {
        return Err(Error::SingleClusterUndefined);
    }

    let clusters = result.clusters();
    let label: Vec<usize> = {
        let mut label = vec![0; p];
        for (c, members) in clusters.iter().enumerate() {
            for &j in members {
                label[j] = c;
            }
        }
        label
    };

    let per_series: Vec<f64> = (0..p)
        .map(|t| {
            let own = &clusters[label[t]];
            if own.len() <= 1 {
                return 0.0;
            }
            let a = own.iter().map(|&u| d.get(t, u)).sum::<f64>() / (own.len() - 1) as f64;
            let b = clusters
                .iter()
                .enumerate()
                .filter(|&(c, members)| c != label[t] && !members.is_empty())
                .map(|(_, members)| members.iter().map(|&u| d.get(t, u)).sum::<f64>() / members.len() as f64)
                .fold(f64::INFINITY, f64::min);
            let denom = a.max(b);
            if denom > 0.0 {
                ((b - a) / denom).clamp(-1.0, 1.0)
            } else {
                0.0
            }
        })
        .collect();
    let mean = per_series.iter().sum::<f64>() / p as f64;
    Ok(Silhouette { per_series, mean })
}

/// Total clustering cost for each `k`, in ascending `k`.
///
/// `cfg.k` is ignored; the rest of `cfg` drives the k-medoids runs.
pub fn elbow_curve(
    d: &DistanceMatrix,
    ks: &[usize],
    method: Method,
    cfg: &KMedoidsConfig,
) -> Result<Vec<(usize, f64)>> {
    if ks.is_empty() {
        return Err(Error::Config("k range is empty".into()));
    }
    let mut ks = ks.to_vec();
    ks.sort_unstable();
    ks.dedup();

    ks.par_iter()
        .map(|&k| {
            let result = match method {
                Method::Exact => ExactSolver::default().solve(d, k),
                Method::KMedoids => kmedoids(d, &KMedoidsConfig { k, ..*cfg }),
            };
            result
                .map(|r| (k, r.total_cost))
                .map_err(|e| Error::AtK { k, source: Box::new(e) })
        })
        .collect()
}
