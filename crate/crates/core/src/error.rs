use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("expected a {expected}-channel image, got {actual} channels")]
    ChannelMismatch { expected: u8, actual: u8 },

    #[error("invalid image dimensions {width}x{height}")]
    InvalidDimensions { width: usize, height: usize },

    #[error("buffer holds {actual} bytes, {width}x{height}x{channels} needs {expected}")]
    BufferLength {
        width: usize,
        height: usize,
        channels: u8,
        expected: usize,
        actual: usize,
    },

    #[error("unsupported channel count {0}, only 1 and 3 are allowed")]
    UnsupportedChannels(u8),

    #[error("dimension mismatch: {left_w}x{left_h} vs {right_w}x{right_h}")]
    DimensionMismatch {
        left_w: usize,
        left_h: usize,
        right_w: usize,
        right_h: usize,
    },

    #[error("gaussian sigma must be positive and finite, got {0}")]
    InvalidSigma(f64),

    #[error("channel subset must hold 1 or 2 channels, got {0}")]
    InvalidChannelSubset(usize),

    #[error("image decode failed: {0}")]
    Decode(String),

    #[error("image encode failed: {0}")]
    Encode(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("manifest line {line}: {message}")]
    Manifest { line: usize, message: String },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn config(message: impl Into<String>) -> Self {
        Error::InvalidConfig(message.into())
    }
}
