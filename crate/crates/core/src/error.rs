//! Error type shared by every module of the crate.

use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    // ── input validation ────────────────────────────────────────────
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("record has {0} samples, at least 2 are required")]
    TooShort(usize),

    // ── ingestion ───────────────────────────────────────────────────
    #[error("{path}: empty file")]
    EmptyFile { path: PathBuf },

    #[error("{path}:{line}: unparsable row: {reason}")]
    Parse {
        path: PathBuf,
        line: usize,
        reason: String,
    },

    #[error("{path}:{line}: non-uniform sampling (step {found} vs {expected})")]
    NonUniformSampling {
        path: PathBuf,
        line: usize,
        expected: f64,
        found: f64,
    },

    #[error("dangling reference: {0}")]
    DanglingReference(String),

    #[error("duplicate id: {0}")]
    DuplicateId(String),

    // ── numerical degeneracies ──────────────────────────────────────
    #[error("empty spectrum")]
    EmptySpectrum,

    #[error("band empty: no ordinates in [{lo}, {hi}] Hz")]
    BandEmpty { lo: f64, hi: f64 },

    #[error("unstable df: {df} Hz exceeds {max} Hz")]
    UnstableDf { df: f64, max: f64 },

    #[error("flat spectrum")]
    FlatSpectrum,

    #[error("zero variance")]
    ZeroVariance,

    #[error("undersampled oscillator: dt/T = {ratio}")]
    UndersampledOscillator { ratio: f64 },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    // ── lookups ─────────────────────────────────────────────────────
    #[error("unknown parameter: {0}")]
    UnknownParameter(String),

    #[error("no matching records: {0}")]
    NoMatchingRecords(String),

    #[error("missing station coordinates for: {}", .0.join(", "))]
    MissingStations(Vec<String>),

    // ── plumbing ────────────────────────────────────────────────────
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

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

    /// True for failures caused by the filesystem rather than the data.
    pub fn is_io(&self) -> bool {
        matches!(self, Error::Io { .. })
    }
}
