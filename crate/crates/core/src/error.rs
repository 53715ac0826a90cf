use thiserror::Error;

/// Errors raised by the numerical routines and experiment drivers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (max asymmetry {0:.3e})")]
    NotHermitian(f64),

    #[error("eigendecomposition did not converge after {sweeps} sweeps (off-diagonal norm {off:.3e})")]
    NoConvergence { sweeps: usize, off: f64 },

    #[error("invalid quantum state: {0}")]
    InvalidState(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid channel: {0}")]
    InvalidChannel(String),

    #[error("value out of range: {0}")]
    OutOfRange(String),

    #[error("operation requires a uniform prior, got p = {0}")]
    NonUniformPrior(f64),

    #[error("chain rule violated: |H- + H+ - H1 - H2| = {0:.3e}")]
    ChainRuleViolation(f64),

    #[error("invalid ensemble: {0}")]
    InvalidEnsemble(String),

    #[error("concavity gap evaluations disagree by {0:.3e}")]
    EqualityFormMismatch(f64),

    #[error("dimension budget exceeded: {0}")]
    DimensionBudgetExceeded(String),

    #[error("channel list length {len} is not divisible by {block}")]
    BadLength { len: usize, block: usize },

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Failures reading or writing files.
    pub fn is_io(&self) -> bool {
        match self {
            Error::Io(_) => true,
            Error::Csv(e) => matches!(e.kind(), csv::ErrorKind::Io(_)),
            _ => false,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
