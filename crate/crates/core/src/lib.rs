//! Dynamic time warping distances and clustering of time series.
//!
//! Pairwise costs come from a two-row dynamic program with an optional
//! Sakoe-Chiba band. Series are then split into `k` clusters, each
//! represented by a medoid, either exactly with a branch-and-bound search
//! that certifies global optimality or heuristically with k-medoids over
//! lazily computed distances.

pub mod cli;
pub mod cluster;
pub mod dtw;
pub mod error;
pub mod exact;
pub mod io;
pub mod kmedoids;
pub mod lazy;
pub mod matrix;
pub mod oracle;
pub mod series;
pub mod synthetic;
pub mod validation;

pub use cluster::{
    assignment_cost, validate_assignment, AssignmentMatrix, Certificate, ClusterResult, ConstraintViolation,
};
pub use dtw::{dtw, dtw_distance, dtw_distance_with_path, WarpPath};
pub use error::{Error, Result};
pub use exact::{solve_exact, ExactSolver};
pub use kmedoids::{kmedoids, kmedoids_restart, KMedoidsConfig, RestartOutcome};
pub use lazy::LazyDistanceSource;
pub use matrix::{build_matrix, DistanceMatrix, Distances, MatrixBuilder};
pub use series::{TimeSeries, WarpWindow};
pub use validation::{elbow_curve, silhouette, Method, ScoreReport, Silhouette};
