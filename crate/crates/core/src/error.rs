use std::path::PathBuf;

/// Errors produced anywhere in the crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dataset is empty")]
    EmptyDataset,

    #[error("dimension mismatch{}: expected {expected}, found {found}", line_suffix(*.line))]
    DimensionMismatch {
        expected: usize,
        found: usize,
        /// 1-based source line (or array element) when the points came from a file.
        line: Option<usize>,
    },

    #[error("non-finite coordinate at point {point}, axis {axis}")]
    InvalidCoordinate { point: usize, axis: usize },

    #[error("coordinate {value} on axis {axis} lies outside the unit interval")]
    OutOfDomain { axis: usize, value: f64 },

    #[error("cell index {index:?} is invalid for resolution a={a}")]
    InvalidIndex { index: Vec<u32>, a: u32 },

    #[error("no cells were kept; nothing to chain")]
    NoCellsKept,

    #[error("manifold dimension must be at least 1, got {0}")]
    InvalidDimension(usize),

    #[error("covariance is degenerate (all points coincide)")]
    DegenerateCovariance,

    #[error("found certificate violated: {0}")]
    CertificateViolation(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

fn line_suffix(line: Option<usize>) -> String {
    match line {
        Some(l) => format!(" at line {l}"),
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
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
