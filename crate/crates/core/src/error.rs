use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unreadable file {path}: {reason}")]
    Unreadable { path: PathBuf, reason: String },

    #[error("unsupported format: {0}")]
    UnsupportedFormat(String),

    #[error("dimension mismatch: expected {expected_width}x{expected_height}, got {width}x{height}")]
    DimensionMismatch {
        expected_width: usize,
        expected_height: usize,
        width: usize,
        height: usize,
    },

    #[error("frame {width}x{height} is smaller than the 7x7 operator support")]
    FrameTooSmall { width: usize, height: usize },

    #[error("no input frames in {0}")]
    EmptySequence(PathBuf),

    #[error("invalid sequence: {0}")]
    InvalidSequence(String),

    #[error("invalid ground-truth label {0}")]
    InvalidLabel(u8),

    #[error("invalid mask value {0} (expected 0 or 255)")]
    InvalidMaskValue(u8),

    #[error("invalid parameter: {0}")]
    InvalidParams(String),

    #[error("invalid model snapshot: {0}")]
    Snapshot(String),

    #[error("nothing to aggregate")]
    EmptyAggregate,

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn unreadable(path: impl Into<PathBuf>, reason: impl ToString) -> Self {
        Error::Unreadable {
            path: path.into(),
            reason: reason.to_string(),
        }
    }

    pub(crate) fn dimension_mismatch(expected: (usize, usize), got: (usize, usize)) -> Self {
        Error::DimensionMismatch {
            expected_width: expected.0,
            expected_height: expected.1,
            width: got.0,
            height: got.1,
        }
    }
}
