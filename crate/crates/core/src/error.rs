use std::io;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid shape {rows}x{cols}: each axis needs at least two samples")]
    InvalidShape { rows: usize, cols: usize },

    #[error("sample buffer holds {found} values, expected {expected}")]
    SampleCount { expected: usize, found: usize },

    #[error("sampling intervals must be positive and finite (dx={dx}, dy={dy})")]
    InvalidSpacing { dx: f64, dy: f64 },

    #[error("dimension mismatch: {left:?} vs {right:?}")]
    DimensionMismatch {
        left: (usize, usize),
        right: (usize, usize),
    },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("TV gradient vanishes (constant field); no descent direction exists")]
    ZeroGradient,

    #[error("ground-truth field is identically zero")]
    ZeroTruth,

    #[error("magnitude data is identically zero")]
    AllZeroInput,

    #[error("Nyquist violation: support {support:?} exceeds half of window {window:?}")]
    NyquistViolation {
        window: (usize, usize),
        support: (usize, usize),
    },

    #[error("bad magic bytes: not a field file")]
    BadMagic,

    #[error("payload length mismatch: expected {expected} bytes, found {found}")]
    TruncatedPayload { expected: usize, found: usize },

    #[error("unknown payload kind byte {0}")]
    UnknownKind(u8),

    #[error("mask byte {0} is neither 0 nor 1")]
    InvalidMaskByte(u8),

    #[error("unexpected payload kind: expected {expected}, found {found}")]
    WrongKind {
        expected: &'static str,
        found: &'static str,
    },

    #[error("malformed trace: {0}")]
    MalformedTrace(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

pub(crate) fn check_same_shape(left: (usize, usize), right: (usize, usize)) -> Result<()> {
    if left == right {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { left, right })
    }
}
