use std::path::PathBuf;
use thiserror::Error;

/// Errors from grid construction, transforms, and tensor file IO.
#[derive(Debug, Error)]
pub enum GridError {
    #[error("grid dimensions must be positive, got {height}x{width}")]
    InvalidDimensions { height: usize, width: usize },

    #[error("data length {actual} does not match {height}x{width} = {expected}")]
    LengthMismatch {
        height: usize,
        width: usize,
        expected: usize,
        actual: usize,
    },

    #[error("non-finite value at flat index {index}")]
    NonFinite { index: usize },

    #[error("FFT requires power-of-two dimensions, got {height}x{width}")]
    DimensionNotPowerOfTwo { height: usize, width: usize },

    #[error("sigma must be positive, got {0}")]
    InvalidSigma(f64),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: malformed tensor file at byte {offset}: {reason}")]
    Format {
        path: PathBuf,
        offset: u64,
        reason: String,
    },
}
