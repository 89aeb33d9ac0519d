use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("non-finite input: {0}")]
    NonFinite(&'static str),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("{what} out of range: {detail}")]
    OutOfRange { what: &'static str, detail: String },

    #[error("method {method} cannot be used at t = {t} (needs t >= {min})")]
    MethodRange {
        method: &'static str,
        t: f64,
        min: f64,
    },

    #[error("saddle solver failed to converge for n = {n}, U = {u} (residual {residual:e})")]
    NoConvergence { n: u64, u: f64, residual: f64 },

    #[error("quadrature tolerance not met: value {value}, est_error {est_error:e}, tolerance {tolerance:e}")]
    Tolerance {
        value: f64,
        est_error: f64,
        tolerance: f64,
    },

    #[error("divisor table covers n <= {bound}, but n = {requested} was requested")]
    TableTooSmall { bound: u64, requested: u64 },

    #[error("resource error: {0}")]
    Resource(String),

    #[error("bound violated: {0}")]
    BoundViolated(String),

    #[error("malformed cache file: {0}")]
    BadCache(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
