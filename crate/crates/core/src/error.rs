use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("type error: {0}")]
    Type(String),
    #[error("null value passed to a scalar predicate")]
    NullValue,
    #[error("cannot build statistics over an empty chunk")]
    EmptyChunk,
    #[error("configuration error: {0}")]
    Config(String),
    #[error("precision error: {0}")]
    Precision(String),
    #[error("dictionary cardinality {0} exceeds 2^32")]
    Cardinality(u64),
    #[error("invalid encoding: {0}")]
    InvalidEncoding(String),
    #[error("corrupt chunk: {0}")]
    CorruptChunk(String),
    #[error("corrupt block: {0}")]
    CorruptBlock(String),
    #[error("index {index} out of range for length {len}")]
    Index { index: usize, len: usize },
    #[error("not a COLF file: {0}")]
    NotColf(String),
    #[error("corrupt file: {0}")]
    CorruptFile(String),
    #[error("unknown column `{0}`")]
    Name(String),
    #[error("shape mismatch: expected {expected} rows, got {actual}")]
    Shape { expected: usize, actual: usize },
    #[error("schema error: {0}")]
    Schema(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Error {
    pub(crate) fn corrupt_chunk(msg: impl Into<String>) -> Self {
        Error::CorruptChunk(msg.into())
    }

    pub(crate) fn corrupt_file(msg: impl Into<String>) -> Self {
        Error::CorruptFile(msg.into())
    }
}
