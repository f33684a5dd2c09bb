use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("fields live on different grids")]
    GridMismatch,

    #[error(
        "frequency {frequency:.6} (n = {n}) reaches the grid Nyquist limit {nyquist:.6}; refine the grid"
    )]
    Nyquist { n: u32, frequency: f64, nyquist: f64 },

    #[error("bandwidth {bandwidth:.6} exceeds the alias-free limit {limit:.6}")]
    Bandwidth { bandwidth: f64, limit: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid coupling spec: {0}")]
    InvalidSpec(String),

    #[error("non-finite state detected at step {step} (t = {time})")]
    NonFinite { step: usize, time: f64 },

    #[error("trajectories are sampled differently: {0}")]
    SamplingMismatch(String),

    #[error("trajectory provenance mismatch: {0}")]
    Provenance(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("fit error: {0}")]
    Fit(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn arg(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
