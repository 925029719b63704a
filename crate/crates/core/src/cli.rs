//! Command-line front end: argument parsing, the ingest → matrix → cluster →
//! scores pipeline, and the benchmark loop.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use clap::{ArgGroup, Parser};

use crate::cluster::{Certificate, ClusterResult};
use crate::error::{Error, Result};
use crate::exact::ExactSolver;
use crate::io::{self, IngestOptions, RunSummary};
use crate::kmedoids::{kmedoids, KMedoidsConfig};
use crate::lazy::LazyDistanceSource;
use crate::matrix::{DistanceMatrix, MatrixBuilder};
use crate::series::{validate_dataset, WarpWindow};
use crate::validation::{elbow_curve, silhouette, Method};

/// Inclusive `a..b` range of cluster counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KRange {
    pub start: usize,
    pub end: usize,
}

impl FromStr for KRange {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Config(format!("k range must look like `2..6`, got `{s}`"));
        let (a, b) = s.split_once("..").ok_or_else(bad)?;
        let start: usize = a.trim().parse().map_err(|_| bad())?;
        let end: usize = b.trim().parse().map_err(|_| bad())?;
        if start == 0 || start > end {
            return Err(bad());
        }
        Ok(KRange { start, end })
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "warpcluster",
    version,
    about = "Cluster time series by dynamic time warping distance"
)]
#[command(group(ArgGroup::new("clusters").required(true).args(["k", "k_range"])))]
pub struct Args {
    /// CSV/TSV files, one series per row.
    #[arg(long, required = true, num_args = 1..)]
    pub input: Vec<PathBuf>,
    /// Drop the first column of every row (class label).
    #[arg(long)]
    pub labels: bool,
    /// Cell separator; defaults to tab for .tsv files and comma otherwise.
    #[arg(long)]
    pub delimiter: Option<char>,
    #[arg(long)]
    pub k: Option<usize>,
    /// Inclusive range such as `2..6`; results go to one `k<k>/` directory per value.
    #[arg(long = "k-range")]
    pub k_range: Option<KRange>,
    #[arg(long, default_value = "kmedoids")]
    pub method: Method,
    /// Sakoe-Chiba half-width, or `unlimited`.
    #[arg(long, default_value = "unlimited")]
    pub window: WarpWindow,
    /// Widen the window per pair to the length difference instead of failing.
    #[arg(long)]
    pub auto_widen: bool,
    /// Parallel tasks for the distance matrix; defaults to the number of CPUs.
    #[arg(long)]
    pub workers: Option<usize>,
    #[arg(long, default_value_t = 10)]
    pub restarts: usize,
    #[arg(long = "max-iter", default_value_t = 100)]
    pub max_iter: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Write silhouette values and the cost-versus-k curve to scores.csv.
    #[arg(long)]
    pub scores: bool,
    #[arg(long)]
    pub save_matrix: Option<PathBuf>,
    #[arg(long)]
    pub load_matrix: Option<PathBuf>,
    /// Z-score every series before computing distances.
    #[arg(long)]
    pub normalize: bool,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    /// Repeat the run this many times and report median phase timings.
    #[arg(long)]
    pub bench: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KSelection {
    Single(usize),
    Range(KRange),
}

impl KSelection {
    pub fn values(&self) -> Vec<usize> {
        match *self {
            KSelection::Single(k) => vec![k],
            KSelection::Range(r) => (r.start..=r.end).collect(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub inputs: Vec<PathBuf>,
    pub ingest: IngestOptions,
    pub ks: KSelection,
    pub method: Method,
    pub window: WarpWindow,
    pub auto_widen: bool,
    pub workers: usize,
    pub restarts: usize,
    pub max_iterations: usize,
    pub seed: u64,
    pub scores: bool,
    pub save_matrix: Option<PathBuf>,
    pub load_matrix: Option<PathBuf>,
    pub normalize: bool,
    pub out_dir: PathBuf,
}

impl RunConfig {
    /// Defaults matching the command line, for a single `k`.
    pub fn new(inputs: Vec<PathBuf>, k: usize, method: Method, out_dir: impl Into<PathBuf>) -> Self {
        Self {
            inputs,
            ingest: IngestOptions::default(),
            ks: KSelection::Single(k),
            method,
            window: WarpWindow::Unlimited,
            auto_widen: false,
            workers: default_workers(),
            restarts: 10,
            max_iterations: 100,
            seed: 0,
            scores: false,
            save_matrix: None,
            load_matrix: None,
            normalize: false,
            out_dir: out_dir.into(),
        }
    }

    fn kmedoids_config(&self, k: usize) -> KMedoidsConfig {
        KMedoidsConfig::new(k)
            .with_restarts(self.restarts)
            .with_max_iterations(self.max_iterations)
            .with_seed(self.seed)
    }
}

fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

impl TryFrom<Args> for RunConfig {
    type Error = Error;

    fn try_from(a: Args) -> Result<Self> {
        let ks = match (a.k, a.k_range) {
            (Some(k), None) => KSelection::Single(k),
            (None, Some(r)) => KSelection::Range(r),
            _ => return Err(Error::Config("give exactly one of --k and --k-range".into())),
        };
        let workers = a.workers.unwrap_or_else(default_workers);
        if workers == 0 {
            return Err(Error::Config("--workers must be at least 1".into()));
        }
        Ok(RunConfig {
            inputs: a.input,
            ingest: IngestOptions {
                labels: a.labels,
                delimiter: a.delimiter,
            },
            ks,
            method: a.method,
            window: a.window,
            auto_widen: a.auto_widen,
            workers,
            restarts: a.restarts,
            max_iterations: a.max_iter,
            seed: a.seed,
            scores: a.scores,
            save_matrix: a.save_matrix,
            load_matrix: a.load_matrix,
            normalize: a.normalize,
            out_dir: a.out,
        })
    }
}

fn dataset_name(inputs: &[PathBuf]) -> String {
    inputs
        .iter()
        .map(|p| {
            p.file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default()
        })
        .collect::<Vec<_>>()
        .join("+")
}

/// Run the whole pipeline and write `assignments.csv`, `medoids.csv`,
/// `summary.json` and, with scores on, `scores.csv`. A single `k` writes
/// into the output directory; a range writes into `k<k>/` below it.
pub fn run(cfg: &RunConfig) -> Result<Vec<RunSummary>> {
    let t = Instant::now();
    let mut data = io::ingest(&cfg.inputs, cfg.ingest)?;
    if cfg.normalize {
        data.iter_mut().for_each(|s| s.normalize());
    }
    validate_dataset(&data)?;
    let ingest_seconds = t.elapsed().as_secs_f64();

    let p = data.len();
    let ks = cfg.ks.values();
    if let Some(&k) = ks.iter().find(|&&k| k == 0 || k > p) {
        return Err(Error::KOutOfRange { k, p });
    }
    fs::create_dir_all(&cfg.out_dir).map_err(|e| Error::io(&cfg.out_dir, e))?;

    let t = Instant::now();
    let needs_matrix =
        cfg.method == Method::Exact || cfg.scores || cfg.save_matrix.is_some() || cfg.load_matrix.is_some();
    let (matrix, mut computed_pairs) = if let Some(path) = &cfg.load_matrix {
        let m = DistanceMatrix::load(path)?;
        if m.len() != p {
            return Err(Error::DistanceMatrixInvalid(format!(
                "{} holds {} series but the input has {p}",
                path.display(),
                m.len()
            )));
        }
        (Some(m), 0)
    } else if needs_matrix {
        let (m, evals) = MatrixBuilder::new(cfg.window)
            .auto_widen(cfg.auto_widen)
            .workers(cfg.workers)
            .build_counted(&data)?;
        (Some(m), evals)
    } else {
        (None, 0)
    };
    if let (Some(m), Some(path)) = (&matrix, &cfg.save_matrix) {
        m.save(path)?;
    }
    let lazy = match matrix {
        Some(_) => None,
        None => Some(LazyDistanceSource::with_auto_widen(&data, cfg.window, cfg.auto_widen)?),
    };
    let matrix_seconds = t.elapsed().as_secs_f64();

    let mut runs: Vec<(usize, ClusterResult, f64)> = Vec::with_capacity(ks.len());
    for &k in &ks {
        let t = Instant::now();
        let result = match (cfg.method, &matrix, &lazy) {
            (Method::Exact, Some(m), _) => ExactSolver::default().solve(m, k)?,
            (Method::KMedoids, Some(m), _) => kmedoids(m, &cfg.kmedoids_config(k))?,
            (Method::KMedoids, None, Some(src)) => kmedoids(src, &cfg.kmedoids_config(k))?,
            _ => unreachable!("exact method always builds the matrix"),
        };
        if cfg.method == Method::Exact && result.certificate != Certificate::GlobalOptimal {
            eprintln!("warning: node budget exhausted for k = {k}; returning the best solution found");
        }
        runs.push((k, result, t.elapsed().as_secs_f64()));
    }
    if let Some(src) = &lazy {
        computed_pairs = src.computed_pairs();
    }

    let range_elbow: Vec<(usize, f64)> = runs.iter().map(|(k, r, _)| (*k, r.total_cost)).collect();
    let (length_min, length_median, length_max) = io::length_stats(&data);
    let mut summaries = Vec::with_capacity(runs.len());

    for (k, result, cluster_seconds) in runs {
        let t = Instant::now();
        let dir = match cfg.ks {
            KSelection::Single(_) => cfg.out_dir.clone(),
            KSelection::Range(_) => cfg.out_dir.join(format!("k{k}")),
        };
        fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;

        let mut mean_silhouette = None;
        if cfg.scores {
            let m = matrix.as_ref().expect("scores build the matrix");
            let sil = if k >= 2 { Some(silhouette(m, &result)?) } else { None };
            mean_silhouette = sil.as_ref().map(|s| s.mean);
            let elbow = match cfg.ks {
                KSelection::Range(_) => range_elbow.clone(),
                KSelection::Single(_) => {
                    let lower: Vec<usize> = (1..k).collect();
                    let mut curve = if lower.is_empty() {
                        Vec::new()
                    } else {
                        elbow_curve(m, &lower, cfg.method, &cfg.kmedoids_config(k))?
                    };
                    curve.push((k, result.total_cost));
                    curve
                }
            };
            io::write_scores(
                &dir.join("scores.csv"),
                &data,
                sil.as_ref().map(|s| s.per_series.as_slice()),
                &elbow,
            )?;
        }
        let scores_seconds = if cfg.scores { t.elapsed().as_secs_f64() } else { 0.0 };

        let summary = RunSummary {
            dataset: dataset_name(&cfg.inputs),
            p,
            length_min,
            length_median,
            length_max,
            method: cfg.method.as_str().into(),
            k,
            window: cfg.window.to_string(),
            workers: cfg.workers,
            normalized: cfg.normalize,
            total_cost: result.total_cost,
            certificate: result.certificate.as_str().into(),
            nodes_explored: result.nodes_explored,
            mean_silhouette,
            ingest_seconds,
            matrix_seconds,
            cluster_seconds,
            scores_seconds,
            computed_pairs,
        };
        io::write_assignments(&dir.join("assignments.csv"), &data, &result)?;
        io::write_medoids(&dir.join("medoids.csv"), &data, &result)?;
        io::write_summary(&dir.join("summary.json"), &summary)?;
        summaries.push(summary);
    }
    Ok(summaries)
}

/// Median phase timings over repeated runs.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub dataset: String,
    pub p: usize,
    pub length_median: f64,
    pub method: String,
    pub k: usize,
    pub workers: usize,
    pub certificate: String,
    pub repetitions: usize,
    pub ingest_seconds: f64,
    pub matrix_seconds: f64,
    pub cluster_seconds: f64,
    pub scores_seconds: f64,
}

pub const BENCH_HEADER: &str = "dataset,p,length_median,method,k,workers,certificate,repetitions,\
ingest_seconds,matrix_seconds,cluster_seconds,scores_seconds";

impl BenchRow {
    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            self.dataset,
            self.p,
            self.length_median,
            self.method,
            self.k,
            self.workers,
            self.certificate,
            self.repetitions,
            self.ingest_seconds,
            self.matrix_seconds,
            self.cluster_seconds,
            self.scores_seconds
        )
    }
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

/// Repeat [`run`] and write `bench.csv` into the output directory.
pub fn bench(cfg: &RunConfig, repetitions: usize) -> Result<Vec<BenchRow>> {
    if repetitions == 0 {
        return Err(Error::Config("--bench needs at least one repetition".into()));
    }
    let mut reps = Vec::with_capacity(repetitions);
    for _ in 0..repetitions {
        reps.push(run(cfg)?);
    }

    let rows: Vec<BenchRow> = (0..reps[0].len())
        .map(|i| {
            let first = &reps[0][i];
            let phase = |f: fn(&RunSummary) -> f64| median(reps.iter().map(|r| f(&r[i])).collect());
            BenchRow {
                dataset: first.dataset.clone(),
                p: first.p,
                length_median: first.length_median,
                method: first.method.clone(),
                k: first.k,
                workers: first.workers,
                certificate: first.certificate.clone(),
                repetitions,
                ingest_seconds: phase(|s| s.ingest_seconds),
                matrix_seconds: phase(|s| s.matrix_seconds),
                cluster_seconds: phase(|s| s.cluster_seconds),
                scores_seconds: phase(|s| s.scores_seconds),
            }
        })
        .collect();

    let mut csv = String::from(BENCH_HEADER);
    csv.push('\n');
    for r in &rows {
        writeln!(csv, "{}", r.to_csv()).unwrap();
    }
    let path = cfg.out_dir.join("bench.csv");
    fs::write(&path, csv).map_err(|e| Error::io(&path, e))?;
    Ok(rows)
}

/// Entry point shared by the binary and tests; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let args = match Args::try_parse_from(args) {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let bench_reps = args.bench;
    let cfg = match RunConfig::try_from(args) {
        Ok(c) => c,
        Err(e) => return report(&e),
    };

    let outcome = match bench_reps {
        Some(reps) => bench(&cfg, reps).map(|rows| {
            println!("{BENCH_HEADER}");
            for r in rows {
                println!("{}", r.to_csv());
            }
        }),
        None => run(&cfg).map(|summaries| {
            for s in summaries {
                println!(
                    "k={} total_cost={} certificate={} computed_pairs={} out={}",
                    s.k,
                    s.total_cost,
                    s.certificate,
                    s.computed_pairs,
                    display_out(&cfg.out_dir, &cfg.ks, s.k)
                );
            }
        }),
    };
    match outcome {
        Ok(()) => 0,
        Err(e) => report(&e),
    }
}

fn display_out(out: &Path, ks: &KSelection, k: usize) -> String {
    match ks {
        KSelection::Single(_) => out.display().to_string(),
        KSelection::Range(_) => out.join(format!("k{k}")).display().to_string(),
    }
}

fn report(e: &Error) -> i32 {
    eprintln!("error: {e}");
    e.exit_code()
}
