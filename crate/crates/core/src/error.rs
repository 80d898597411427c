use thiserror::Error;

#[derive(Debug, Error)]
pub enum DoaError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("size limit exceeded: {0}")]
    SizeLimit(String),
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
    #[error("unsupported geometry: {0}")]
    UnsupportedGeometry(String),
    #[error("not a redundancy array: lag {0} is not realized")]
    NotRedundancy(usize),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, DoaError>;
