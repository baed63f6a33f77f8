use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Error, Debug)]
pub enum Error {
    #[error("qubit count mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("site index {index} out of range 1..={max}")]
    SiteOutOfRange { index: usize, max: usize },

    #[error("Majorana index {index} out of range 1..={max}")]
    MajoranaOutOfRange { index: usize, max: usize },

    #[error("dense realization capped at {cap} qubits, got {l}")]
    DenseCapExceeded { l: usize, cap: usize },

    #[error("operator is not Hermitian: {0}")]
    NonHermitian(String),

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("numerical failure: {0}")]
    Numerics(String),

    #[error("measurement basis incompatible with operator at site {site}")]
    BasisMismatch { site: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
