use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("time arguments out of order: t2 = {t2} < t1 = {t1}")]
    TimeOrder { t1: f64, t2: f64 },
    #[error("negative time {0}")]
    NegativeTime(f64),
    #[error("negative correlation lag {0}")]
    NegativeLag(f64),
    #[error("branching ratio must be non-negative, got {0}")]
    NegativeXi(f64),
    #[error("invalid cavity parameter: {0}")]
    Cavity(String),
    #[error("laser frequency {laser} lies outside the radiative band [{lo}, {hi}]")]
    LaserOutsideBand { laser: f64, lo: f64, hi: f64 },
    #[error("calibration of the {reservoir} reservoir failed: {reason}")]
    Calibration { reservoir: String, reason: String },
    #[error("propagator unitarity drift {drift:e} exceeds {limit:e}")]
    UnitarityDrift { drift: f64, limit: f64 },
    #[error("invalid system specification: {0}")]
    InvalidSpec(String),
    #[error("invalid grid: {0}")]
    Grid(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
