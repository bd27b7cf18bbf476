use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("pole at s = {at}")]
    Pole { at: String },
    #[error("power q^({0}) is not integral in s")]
    FractionalPower(String),
    #[error("out of range: {0}")]
    OutOfRange(String),
    #[error("invalid type: {0}")]
    InvalidType(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("not invertible: {0}")]
    NotInvertible(String),
    #[error("underdetermined system at weight {mu}: {detail}")]
    Underdetermined { mu: String, detail: String },
    #[error("inconsistent system at weight {mu}: {detail}")]
    Inconsistent { mu: String, detail: String },
    #[error("first-order anchor mismatch: {0}")]
    AnchorMismatch(String),
    #[error("out of scope: {0}")]
    OutOfScope(String),
    #[error("structure violation: {0}")]
    Structure(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("cache version mismatch: found {found}, expected {expected}")]
    CacheVersion { found: String, expected: String },
    #[error("cache checksum mismatch")]
    CacheChecksum,
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code for the CLI; check failures themselves exit with 1.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse(_) => 3,
            Error::CacheVersion { .. } => 4,
            Error::CacheChecksum => 5,
            Error::Io(_) => 6,
            Error::InvalidType(_) | Error::OutOfRange(_) => 2,
            _ => 7,
        }
    }
}
