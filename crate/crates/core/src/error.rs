use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("degenerate form: {0}")]
    Degenerate(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("weight k = {k} too small for degree {n} (need even k > n + 1)")]
    WeightTooSmall { k: i64, n: usize },

    /// The fitted Siegel-series polynomial failed its post-checks.
    #[error("calibration failure: {0}")]
    Calibration(String),

    /// An internal identity that must hold for mathematical reasons did not.
    #[error("consistency failure: {0}")]
    Consistency(String),

    #[error("value {value} is not {p}-integral")]
    NotPIntegral { p: u64, value: String },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
