use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("block length {0} is not a power of two >= 2")]
    InvalidBlockLength(usize),

    #[error("K = {k} out of range for N = {n}")]
    InvalidDimension { n: usize, k: usize },

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("frozen position {0} carries a nonzero bit")]
    NonzeroFrozenBit(usize),

    #[error("invalid CRC configuration: {0}")]
    InvalidCrc(String),

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("invalid permutation event: {0}")]
    InvalidEvent(String),

    #[error("invalid decoder parameters: {0}")]
    InvalidParams(String),

    #[error("invalid channel configuration: {0}")]
    InvalidChannel(String),

    #[error("{0}")]
    InvalidStopRule(String),

    #[error("empty iteration trace")]
    EmptyTrace,

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("{0}")]
    Config(String),

    #[error("I/O error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
