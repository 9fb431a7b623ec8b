use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("time {t} is outside the sampled window [{lo}, {hi}]")]
    OutsideWindow { t: f64, lo: f64, hi: f64 },

    #[error("time {t} is not a multiple of the grid step {dt}")]
    OffGrid { t: f64, dt: f64 },

    #[error("noise grid of {requested} samples exceeds the memory cap of {cap}")]
    MemoryCap { requested: usize, cap: usize },

    #[error("conjugate gradient did not converge after {iterations} iterations (relative residual {residual:e})")]
    SolverDiverged { iterations: usize, residual: f64 },

    #[error("matrix is not positive definite (pivot {pivot:e} at row {row})")]
    NotPositiveDefinite { row: usize, pivot: f64 },

    #[error("inverse power iteration did not converge after {iterations} iterations (residual {residual:e})")]
    EigenNotConverged { iterations: usize, residual: f64 },

    #[error("norm blow-up at t = {t}: {before:e} -> {after:e} in one step")]
    BlowUp { t: f64, before: f64, after: f64 },

    #[error("negative input in `{field}` at index {index}: {value:e}")]
    NegativeInput { field: &'static str, index: usize, value: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("disease-free truncation did not settle: {reason}")]
    TruncationNotConverged { reason: String },

    #[error("missing data: {0}")]
    MissingData(String),

    #[error("validation error at `{key}`: {message}")]
    Validation { key: String, message: String },

    #[error("cannot aggregate manifests from different scenarios: `{first}` vs `{other}`")]
    MixedScenarios { first: String, other: String },

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    pub(crate) fn validation(key: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Validation {
            key: key.into(),
            message: message.into(),
        }
    }

    pub(crate) fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }
}
