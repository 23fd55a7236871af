//! Crate-wide error type.

use std::fmt;

/// Errors surfaced by the library API.
#[derive(Debug)]
pub enum Error {
    /// Code distance below the supported minimum of 2.
    InvalidDistance(usize),
    /// A probability argument outside its admissible range.
    InvalidProbability(&'static str, f64),
    /// Noise variance parameter delta outside its admissible range.
    InvalidDelta(f64),
    /// Node id not present in the lattice.
    InvalidNode(usize),
    /// Mismatched vector length against the lattice or mode system.
    DimensionMismatch { expected: usize, got: usize },
    /// Covariance matrix not positive definite.
    SingularCovariance,
    /// Threshold fit could not locate a crossing in the swept range.
    NoCrossing,
    /// Not enough data for the requested fit or estimate.
    InsufficientData(String),
    /// An internal decoding invariant was violated (a bug, not noise).
    Invariant(String),
    /// Configuration file or flag value could not be parsed.
    Config(String),
    /// Underlying I/O failure.
    Io(std::io::Error),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidDistance(d) => write!(f, "code distance must be at least 2, got {d}"),
            Error::InvalidProbability(name, v) => {
                write!(f, "probability `{name}` out of range: {v}")
            }
            Error::InvalidDelta(v) => write!(f, "noise parameter delta out of range: {v}"),
            Error::InvalidNode(id) => write!(f, "node id {id} does not exist"),
            Error::DimensionMismatch { expected, got } => {
                write!(f, "dimension mismatch: expected {expected}, got {got}")
            }
            Error::SingularCovariance => write!(f, "covariance matrix is singular"),
            Error::NoCrossing => write!(f, "no crossing detected in the swept range"),
            Error::InsufficientData(msg) => write!(f, "insufficient data: {msg}"),
            Error::Invariant(msg) => write!(f, "internal invariant violated: {msg}"),
            Error::Config(msg) => write!(f, "configuration error: {msg}"),
            Error::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl std::error::Error for Error {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            Error::Io(e) => Some(e),
            _ => None,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e)
    }
}

/// Convenience alias used across the crate.
pub type Result<T> = std::result::Result<T, Error>;
