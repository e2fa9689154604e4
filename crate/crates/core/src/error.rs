use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid frame: {0}")]
    InvalidFrame(String),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("invalid path set: {0}")]
    InvalidPaths(String),
    #[error("index out of range: {0}")]
    OutOfRange(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("least-squares system is rank deficient at column {column}")]
    RankDeficient { column: usize },
    #[error("channel draw failed: {0}")]
    ChannelDraw(String),
    #[error("true channel has zero energy")]
    ZeroChannel,
    #[error("config error: {0}")]
    Config(String),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
