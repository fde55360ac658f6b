use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid algebra: {0}")]
    InvalidAlgebra(String),
    #[error("symbol is not fundamental")]
    NotFundamental,
    #[error("parameter out of range: {0}")]
    Range(String),
    #[error("unsupported cochain degree {0}")]
    UnsupportedDegree(usize),
    #[error("invalid bilinear form: {0}")]
    InvalidForm(String),
    #[error("degenerate frame: {0}")]
    Degenerate(String),
    #[error("point is not regular ({0}); resample")]
    NotEquiregular(String),
    #[error("consistency check failed: {0}")]
    Inconsistent(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
