use thiserror::Error;

pub type Result<T, E = BenchError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("invalid experiment spec: {0}")]
    Spec(String),

    #[error(transparent)]
    Data(#[from] somm::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("cannot build thread pool: {0}")]
    ThreadPool(String),
}
