use thiserror::Error;

/// Errors raised across the simulation stack.
#[derive(Debug, Error)]
pub enum Error {
    #[error("no collision within search cap {cap} (infinite-horizon geometry or invalid table)")]
    NoCollisionWithinBound { cap: f64 },

    #[error("invalid table: {0}")]
    InvalidTable(String),

    #[error("invalid phase point: {0}")]
    InvalidPoint(String),

    #[error("step dt = {dt} exceeds eps * inf(tau) / 4 = {limit}")]
    StepTooLarge { dt: f64, limit: f64 },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("variance matrix is not symmetric (asymmetry {asym:e} > 1e-10)")]
    NonSymmetricVariance { asym: f64 },

    #[error("too few samples: need at least {min}, got {got}")]
    TooFewSamples { min: usize, got: usize },

    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
