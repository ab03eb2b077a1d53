//! Error type shared by every module of the crate.

use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("I/O error: {0}")]
    Io(#[from] io::Error),

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("malformed record at line {line}: {reason}")]
    MalformedRow { line: usize, reason: String },

    #[error("duplicate id `{0}`")]
    DuplicateId(String),

    #[error("record `{id}`: component {index} = {value} lies outside [0, 1]")]
    OutOfRange {
        id: String,
        index: usize,
        value: f64,
    },

    #[error("non-finite value {value} at component {index}")]
    NonFinite { index: usize, value: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("code length mismatch: {left} bits vs {right} bits")]
    LengthMismatch { left: usize, right: usize },

    #[error("invalid percentile {0}: must lie in [0, 100]")]
    InvalidPercentile(f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("code length {0} outside supported range 1..={max}", max = crate::encoder::MAX_CODE_LENGTH)]
    UnsupportedCodeLength(usize),

    #[error("inconsistent code set: {0}")]
    InvalidCodeSet(String),

    #[error("bad magic: expected {expected:?}, found {found:?}")]
    BadMagic { expected: [u8; 4], found: [u8; 4] },

    #[error("unsupported format version {found} (this build reads version {supported})")]
    VersionMismatch { found: u32, supported: u32 },

    #[error("fingerprint mismatch: file content does not match its recorded fingerprint")]
    FingerprintMismatch,

    #[error("truncated input: {0}")]
    Truncated(&'static str),

    #[error("corrupt payload: {0}")]
    Corrupt(String),

    #[error("percentile mismatch: index encoded at q={index}, queries encoded at q={queries}")]
    PercentileMismatch { index: f64, queries: f64 },

    #[error("no scorable query: every query label is absent from the reference set")]
    NoScorableQuery,
}
