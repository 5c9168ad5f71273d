use thiserror::Error;

/// Library error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid window: lo = {lo} must be < hi = {hi}")]
    InvalidWindow { lo: f64, hi: f64 },

    #[error("non-finite value encountered: {0}")]
    NonFinite(String),

    #[error("invalid parameter: {0}")]
    BadParam(String),

    #[error("stored support of a measure is too small: {0}")]
    SupportShortfall(String),

    #[error("output window {requested} exceeds reachable difference set {reachable}")]
    WindowUnreachable { requested: String, reachable: String },

    #[error("instance too large for the brute-force oracle: {0} atoms (cap {1})")]
    OracleCap(usize, usize),

    #[error("window not coverable within {0} substitution iterations")]
    IterationCap(usize),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("serialization: {0}")]
    Serde(#[from] serde_json::Error),

    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
