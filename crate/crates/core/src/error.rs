use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("empty input signal")]
    EmptySignal,

    #[error("invalid sampling rate {0} Hz")]
    InvalidRate(f64),

    #[error("invalid filter specification: {0}")]
    InvalidFilter(String),

    #[error("invalid window: {0}")]
    InvalidWindow(String),

    #[error("invalid waveform: {0}")]
    InvalidWaveform(String),

    #[error("missing metadata: {0}")]
    MissingMetadata(PathBuf),

    #[error("malformed metadata in {path}: {reason}")]
    MalformedMetadata { path: PathBuf, reason: String },

    #[error("truncated channel: expected {expected} samples in {path}, found {found_bytes} bytes")]
    TruncatedChannel {
        path: PathBuf,
        expected: usize,
        found_bytes: u64,
    },

    #[error("rate mismatch for subject {subject}: {reason}")]
    RateMismatch { subject: String, reason: String },

    #[error("need at least {needed} subjects, got {got}")]
    TooFewSubjects { needed: usize, got: usize },

    #[error("subject {0} assigned to more than one split")]
    OverlappingSplits(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("unknown activity label {0:?}")]
    UnknownActivity(String),

    #[error("no windows left in subset {0}")]
    EmptySubset(String),

    #[error("checkpoint fingerprint mismatch: expected {expected}, found {found}")]
    FingerprintMismatch { expected: String, found: String },

    #[error("corrupt file {path}: {reason}")]
    Corrupt { path: PathBuf, reason: String },

    #[error("non-finite loss at iteration {iteration}: {detail}")]
    NonFinite { iteration: u64, detail: String },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
