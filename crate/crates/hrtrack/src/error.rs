use thiserror::Error;

/// Errors produced by the tracking pipeline and its I/O surface.
#[derive(Debug, Error)]
pub enum Error {
    #[error("session too short: {samples} samples, need at least {required}")]
    SessionTooShort { samples: usize, required: usize },

    #[error("invalid band: low {low_hz} Hz, high {high_hz} Hz, sample rate {sample_rate_hz} Hz")]
    InvalidBand {
        low_hz: f64,
        high_hz: f64,
        sample_rate_hz: f64,
    },

    #[error("bad embedding length {embed_len} for signal of {signal_len} samples")]
    BadEmbedLength { embed_len: usize, signal_len: usize },

    #[error("trajectory matrix decomposition failed: {0}")]
    DecompositionFailure(String),

    #[error("no in-band motion reference components found")]
    NoReferencesFound,

    #[error("adaptive filter diverged (weight magnitude exceeded {bound})")]
    FilterDiverged { bound: f64 },

    #[error("signal of {signal_len} samples exceeds spectral grid of {grid_size}")]
    GridTooSmall { signal_len: usize, grid_size: usize },

    #[error("spectrum has no in-band energy")]
    EmptySpectrum,

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("ground truth is constant; Pearson correlation undefined")]
    DegenerateTruth,

    #[error("parse error at {path}:{line}:{column}: {message}")]
    ParseError {
        path: String,
        line: usize,
        column: usize,
        message: String,
    },

    #[error("sample rate missing from metadata file {0}")]
    RateMissing(String),

    #[error("column mismatch in {path}: expected {expected}, got {got}")]
    ColumnMismatch {
        path: String,
        expected: String,
        got: String,
    },

    #[error("bad synthesis profile: {0}")]
    BadProfile(String),

    #[error("invalid configuration: {0}")]
    BadConfig(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
