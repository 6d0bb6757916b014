use thiserror::Error;

/// Failures while decoding `.grd` and `.hwc` files.
#[derive(Debug, Error)]
pub enum FormatError {
    #[error("malformed header: {0}")]
    MalformedHeader(String),
    #[error("bad magic {found:?}, expected {expected:?}")]
    BadMagic { expected: &'static str, found: String },
    #[error("unsupported dimension d={0} (supported: 1..=3)")]
    UnsupportedDimension(usize),
    #[error("level J={level} is out of range for d={dim}")]
    LevelMismatch { dim: usize, level: usize },
    #[error("unsupported dtype {0:?}")]
    UnsupportedDtype(String),
    #[error("truncated payload: expected {expected} bytes, found {found}")]
    Truncated { expected: usize, found: usize },
    #[error("trailing data after payload ({0} bytes)")]
    TrailingData(usize),
}

impl FormatError {
    /// Stable numeric code for each failure kind.
    pub fn code(&self) -> u32 {
        match self {
            FormatError::MalformedHeader(_) => 10,
            FormatError::BadMagic { .. } => 11,
            FormatError::UnsupportedDimension(_) => 12,
            FormatError::LevelMismatch { .. } => 13,
            FormatError::UnsupportedDtype(_) => 14,
            FormatError::Truncated { .. } => 15,
            FormatError::TrailingData(_) => 16,
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("parameter error: {0}")]
    Parameter(String),
    #[error("band {band:?} exceeds the cap {cap}")]
    BandRange { band: Vec<usize>, cap: usize },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("incompatible grid: {0}")]
    IncompatibleGrid(String),
    #[error("support violation: {0}")]
    SupportViolation(String),
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("insufficient data: need {needed}, got {got}")]
    InsufficientData { needed: usize, got: usize },
    #[error(transparent)]
    Format(#[from] FormatError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    /// True for failures caused by the file system or file contents.
    pub fn is_io(&self) -> bool {
        matches!(self, Error::Io(_) | Error::Format(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
