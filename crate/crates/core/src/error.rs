use std::path::PathBuf;

/// Errors shared across the crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("capacity: {what} needs {needed} entries, budget is {budget}")]
    Capacity {
        what: &'static str,
        needed: u64,
        budget: u64,
    },

    #[error("n = {n} outside table range [1, {limit}]")]
    OutOfRange { n: u64, limit: u64 },

    #[error("tables cover only {limit}, need at least {needed}")]
    TablesTooSmall { limit: u64, needed: u64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("grid of {points} points exceeds point budget {budget}")]
    GridBudget { points: u64, budget: u64 },

    #[error("grid Nyquist step {step:.3e} too coarse for k = {k}, alpha = {alpha} (need <= {needed:.3e})")]
    NyquistViolation {
        step: f64,
        needed: f64,
        k: u32,
        alpha: f64,
    },

    #[error("enumeration cost budget exceeded: {0}")]
    CostBudget(String),

    #[error("cache file {path}: {reason}")]
    Cache { path: PathBuf, reason: String },

    #[error("zero table {path}, line {line}: {reason}")]
    ZeroTable {
        path: PathBuf,
        line: usize,
        reason: String,
    },

    #[error("ill-conditioned fit: condition estimate {cond:.3e} exceeds {max:.3e}")]
    IllConditionedFit { cond: f64, max: f64 },

    #[error("oscillation density would go negative: 2*sum a_n = {0} >= 1")]
    InvalidDensity(f64),

    #[error("unsupported mollifier for this operation: {0}")]
    UnsupportedSpec(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
