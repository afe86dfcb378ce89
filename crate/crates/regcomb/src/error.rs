use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is rank deficient: rank {found} < {expected}")]
    RankDeficient { found: usize, expected: usize },
    #[error("matrix is not symmetric positive definite")]
    NotSpd,
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("index {index} out of range for ground set of size {size}")]
    IndexOutOfRange { index: usize, size: usize },
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("work bound exceeded: {task} needs about {estimate}, bound is {bound}")]
    WorkBound {
        task: String,
        estimate: String,
        bound: String,
    },
    #[error("invalid decoding certificate: phi(gamma^a) != m*e^a at column {column}")]
    BadCertificate { column: usize },
    #[error("invalid structure member: {0}")]
    BadMember(String),
    #[error("local correction retries exhausted after {retries} attempts")]
    RetriesExhausted { retries: usize },
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
