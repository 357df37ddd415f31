use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: left operand has d = {left}, right operand has d = {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("shape mismatch: {left} vs {right}")]
    ShapeMismatch { left: String, right: String },

    #[error("no convergence after {cap} iterations")]
    NoConvergence { cap: usize },

    #[error("diagonal {offset} is empty in a matrix of size {size}")]
    EmptyDiagonal { offset: isize, size: usize },

    #[error("coefficient index {index} is outside the stored range [{lo}, {hi}]")]
    OutOfRange { index: isize, lo: isize, hi: isize },

    #[error("matrix must be Toeplitz-tagged")]
    NotToeplitz,

    #[error("matrix must be upper triangular")]
    NotUpperTriangular,

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("invalid data: {0}")]
    InvalidData(String),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
