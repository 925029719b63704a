use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid series `{id}`: {reason}")]
    InvalidSeries { id: String, reason: String },

    #[error("duplicate series id `{0}`")]
    DuplicateId(String),

    #[error("dataset is empty")]
    EmptyDataset,

    /// The band half-width is narrower than the length difference, so the
    /// corner cell (n, m) cannot be reached.
    #[error("warping window {half_width} is infeasible for lengths {n} and {m}{}", pair_suffix(*.pair))]
    BandInfeasible {
        half_width: usize,
        n: usize,
        m: usize,
        pair: Option<(usize, usize)>,
    },

    #[error("index {index} out of range for {len} series")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("k = {k} is out of range for {p} series (need 1 <= k <= p)")]
    KOutOfRange { k: usize, p: usize },

    #[error("invalid distance matrix: {0}")]
    DistanceMatrixInvalid(String),

    #[error("instance too large for exhaustive enumeration: {0}")]
    InstanceTooLarge(String),

    #[error("silhouette is undefined for a single cluster")]
    SingleClusterUndefined,

    #[error("clustering failed for k = {k}: {source}")]
    AtK {
        k: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: {message}")]
    FormatViolation {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("{path}:{line}:{column}: cannot parse `{cell}` as a finite number")]
    ParseFailure {
        path: PathBuf,
        line: usize,
        column: usize,
        cell: String,
    },

    #[error("{path}:{line}: row holds no samples")]
    EmptySeries { path: PathBuf, line: usize },

    #[error("invalid configuration: {0}")]
    Config(String),
}

fn pair_suffix(pair: Option<(usize, usize)>) -> String {
    match pair {
        Some((i, j)) => format!(" (series {i} and {j})"),
        None => String::new(),
    }
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code for the command-line tool. Stable across releases.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io { .. } => 3,
            Error::ParseFailure { .. } | Error::FormatViolation { .. } | Error::EmptySeries { .. } => 4,
            Error::InvalidSeries { .. } | Error::DuplicateId(_) | Error::EmptyDataset => 5,
            Error::BandInfeasible { .. } => 6,
            Error::KOutOfRange { .. } => 7,
            Error::DistanceMatrixInvalid(_) | Error::IndexOutOfRange { .. } => 8,
            Error::InstanceTooLarge(_) | Error::SingleClusterUndefined => 9,
            Error::Config(_) => 2,
            Error::AtK { source, .. } => source.exit_code(),
        }
    }
}
