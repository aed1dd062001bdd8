use thiserror::Error;

pub type Result<T, E = BenchError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error(transparent)]
    Colf(#[from] colf::Error),
    /// `row` counts data rows from 1 (the header is row 0); `column` counts from 1.
    #[error("CSV row {row}, column {column}: {message}")]
    Csv { row: u64, column: usize, message: String },
    #[error("CSV error: {0}")]
    CsvFormat(#[from] csv::Error),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

impl BenchError {
    pub fn config(msg: impl Into<String>) -> Self {
        BenchError::Config(msg.into())
    }
}
