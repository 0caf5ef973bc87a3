use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("trust region violated for user ({zone},{user}): {detail}")]
    TrustRegion {
        zone: usize,
        user: usize,
        detail: String,
    },

    #[error("no feasible initial point after {iterations} iterations (best min-ratio {best_ratio})")]
    InfeasibleInit { iterations: usize, best_ratio: f64 },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("unsupported scheme `{name}`: {reason}")]
    UnsupportedScheme { name: String, reason: String },

    #[error("unknown scheme `{0}`")]
    UnknownScheme(String),

    #[error("failed to parse config: {0}")]
    ConfigParse(String),

    #[error("summary requested for an empty record set")]
    EmptyRecords,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
