use thiserror::Error;

/// Errors across the library. The CLI maps these onto exit codes:
/// format errors -> 3, dimension/contract errors -> 4, sampling and
/// budget failures -> 5, parameter errors -> 2.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch in {what}: expected {expected}, got {got}")]
    Dimension {
        what: &'static str,
        expected: u32,
        got: u32,
    },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("sampling failed: {constraint} (retries exhausted)")]
    Sampling { constraint: String },

    #[error("monomial budget exceeded: {0}")]
    Budget(String),

    #[error("key generation failed: {0}")]
    Keygen(String),

    #[error("bad magic bytes (not an EHE file)")]
    BadMagic,

    #[error("unsupported format version {0}")]
    Version(u16),

    #[error("file kind mismatch: expected {expected}, got {got}")]
    WrongKind { expected: &'static str, got: u8 },

    #[error("truncated or corrupt payload: {0}")]
    Truncated(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn dimension(what: &'static str, expected: u32, got: u32) -> Self {
        Error::Dimension {
            what,
            expected,
            got,
        }
    }
}
