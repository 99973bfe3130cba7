use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("integrity error: {0}")]
    Integrity(String),
    #[error("degenerate data: {0}")]
    DegenerateData(String),
    #[error("data error: {0}")]
    Data(String),
    #[error("varsortability is undefined for a graph without edges")]
    UndefinedVarsortability,
    #[error("MEC enumeration exceeded the cap of {cap} members")]
    EnumerationOverflow { cap: usize },
    #[error("singular likelihood: {0}")]
    SingularLikelihood(String),
    #[error("det(I - W) vanished: {0}")]
    Boundary(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn ensure_same_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}
