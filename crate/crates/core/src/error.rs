use thiserror::Error;

/// Errors raised by the certification library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("matrix is not symmetric (max asymmetry {0:e})")]
    NotSymmetric(f64),

    #[error("degenerate pair: XXᵀ = ZZᵀ, the error vector is zero")]
    Degenerate,

    #[error("value out of range: {0}")]
    Range(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("factors are not aligned: {0}")]
    Alignment(String),

    #[error("rank deficiency: {0}")]
    RankDeficient(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("solver did not reach optimality: {0}")]
    Solver(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
