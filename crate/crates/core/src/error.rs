use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("mode count mismatch: {left} vs {right}")]
    ModeMismatch { left: usize, right: usize },

    #[error("mode index {mode} out of range for {mode_count} mode(s)")]
    BadMode { mode: usize, mode_count: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("monomial degree {degree} exceeds the symmetrization limit {max}")]
    DegreeTooHigh { degree: u32, max: u32 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("non-finite state encountered at t = {t}")]
    NonFinite { t: f64 },

    #[error(
        "positivity violated at t = {t}: minimum eigenvalue {min_eigenvalue:e} \
         (step too large / truncation too small)"
    )]
    Positivity { t: f64, min_eigenvalue: f64 },

    #[error("invalid density matrix: {0}")]
    InvalidDensity(String),

    #[error("stationary state is not unique: null space has dimension {dimension}")]
    Degenerate { dimension: usize },

    #[error(
        "stationary state has eigenvalue {min_eigenvalue:e} below tolerance \
         (truncation too small)"
    )]
    Truncation { min_eigenvalue: f64 },

    #[error("distribution tail not negligible at n_max = {n_max} (ratio {ratio:e}); increase n_max")]
    TailNotNegligible { n_max: usize, ratio: f64 },

    #[error("confluent hypergeometric pole: c = {c} is a non-positive integer")]
    KummerPole { c: f64 },

    #[error("confluent hypergeometric series did not converge within {terms} terms")]
    KummerNonConvergence { terms: usize },

    #[error("missing moment {0}")]
    MissingMoment(String),

    #[error("no positive root: {0}")]
    NoPositiveRoot(String),

    #[error("linear algebra failure: {0}")]
    Linalg(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
