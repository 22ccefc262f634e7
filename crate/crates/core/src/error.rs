use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("grid size {0} is not a power of two >= 16")]
    InvalidGridSize(usize),
    #[error("box length must be positive and finite, got {0}")]
    NonPositiveLength(f64),
    #[error("fields live on different grids (n={left_n}, L={left_l}) vs (n={right_n}, L={right_l})")]
    GridMismatch {
        left_n: usize,
        left_l: f64,
        right_n: usize,
        right_l: f64,
    },
    #[error("field has {got} values, grid expects {expected}")]
    FieldLength { expected: usize, got: usize },
    #[error("field contains a non-finite value at index {0}")]
    NonFinite(usize),
    #[error("gamma function pole at x = {0}")]
    Pole(f64),
    #[error("{func}: argument {arg} outside the domain")]
    Domain { func: &'static str, arg: f64 },
    #[error("{func}: argument {arg} overflows f64")]
    Overflow { func: &'static str, arg: f64 },
    #[error("field mean {mean:e} exceeds tolerance {tol:e}; request mean removal explicitly")]
    NonzeroMean { mean: f64, tol: f64 },
    #[error("L^p exponent must be >= 1, got {0}")]
    InvalidExponent(f64),
    #[error("charge measure is empty")]
    EmptyMeasure,
    #[error("charge at index {0} sits below the layer (z < 0)")]
    ChargeBelowLayer(usize),
    #[error("{0} must be positive")]
    NonPositiveInput(&'static str),
    #[error("invalid model parameter: {0}")]
    InvalidParams(String),
    #[error("background density must be nonzero")]
    ZeroBackground,
    #[error("density is negative at node {0}")]
    NegativeDensity(usize),
    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),
    #[error("energy {energy} fell below the lower bound {bound}; the discretization is unreliable")]
    Diverged { energy: f64, bound: f64 },
    #[error("no negative-energy witness found: {0}")]
    WitnessNotFound(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("1 - b*Q/(2pi) = {0} is not negative; no decay exponent in (1, 2) exists")]
    RhsNonNegative(f64),
    #[error("tail fit needs at least {needed} bins in the window, found {found}")]
    InsufficientBins { needed: usize, found: usize },
    #[error("profile value at r = {0} is not positive")]
    NonPositiveValue(f64),
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed file {path}: {msg}")]
    Format { path: PathBuf, msg: String },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn format(path: impl Into<PathBuf>, msg: impl Into<String>) -> Self {
        Error::Format {
            path: path.into(),
            msg: msg.into(),
        }
    }
}
