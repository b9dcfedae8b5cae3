use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Storage {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("record {index}: {reason}")]
    Validation { index: usize, reason: String },

    #[error("format error: {0}")]
    Format(String),

    #[error("truncated file: header declares {expected} bytes, found {actual}")]
    Truncated { expected: u64, actual: u64 },

    #[error("record {index}: invalid label byte {value}")]
    Label { index: usize, value: u8 },

    #[error("parse error at line {line}{}: {message}", column.map(|c| format!(", column {c}")).unwrap_or_default())]
    Parse {
        line: usize,
        column: Option<usize>,
        message: String,
    },

    #[error("degenerate input at record {index}: {reason}")]
    Degenerate { index: usize, reason: String },

    #[error("split error: {0}")]
    Split(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("training error: {0}")]
    Training(String),

    #[error("numeric error: {0}")]
    Numeric(String),

    #[error("cannot decode image {path}: {message}")]
    Decode { path: PathBuf, message: String },

    #[error("extraction error: {0}")]
    Extraction(String),

    #[error("layout error: {0}")]
    Layout(String),

    #[error("no images could be extracted under {0}")]
    EmptyResult(PathBuf),

    #[error(
        "corrupted artifact: checksum {stored:#010x} does not match computed {computed:#010x}"
    )]
    Corruption { stored: u32, computed: u32 },
}

impl Error {
    pub(crate) fn storage(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Storage {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn check_dim(expected: usize, actual: usize) -> Result<()> {
        if expected == actual {
            Ok(())
        } else {
            Err(Error::DimensionMismatch { expected, actual })
        }
    }
}
