use thiserror::Error;

#[derive(Debug, Error)]
pub enum CtnError {
    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("site index {site} out of range for {n} qubits")]
    SiteOutOfRange { site: usize, n: usize },

    #[error("invalid gate: {0}")]
    InvalidGate(String),

    #[error("state is not normalized (norm^2 = {0})")]
    NotNormalized(f64),

    #[error("operator is not unitary (deviation {0:e})")]
    NotUnitary(f64),

    #[error("operation limited to {limit} qubits, got {n}")]
    TooLarge { n: usize, limit: usize },

    #[error("input is not symplectic")]
    NotSymplectic,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("singular purity denominator (|beta|^2 = 1 and gamma = 0)")]
    SingularPurity,

    #[error("records do not cover t = {0}")]
    WindowNotCovered(usize),

    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, CtnError>;

impl CtnError {
    pub(crate) fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        CtnError::Io { context: context.into(), source }
    }
}
