use thiserror::Error;

/// Errors raised by the metric and geometry routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Malformed argument: wrong dimension, value outside its admissible range.
    #[error("input error: {0}")]
    Input(String),
    /// A point lies outside the domain where the operation is defined.
    #[error("domain error: {0}")]
    Domain(String),
    /// Invalid configuration, e.g. a mixing constant outside its admissible window.
    #[error("configuration error: {0}")]
    Config(String),
    /// The zero tangent vector was passed to an operation that needs v != 0.
    #[error("slit-bundle error: {0}")]
    SlitBundle(String),
    /// Singular or non-finite intermediate (singular Levi matrix, underflowing kernel...).
    #[error("numerical degeneracy: {0}")]
    Degenerate(String),
    /// The operation is not available for this domain kind.
    #[error("unsupported domain: {0}")]
    UnsupportedDomain(String),
    /// A curvature-sign or window hypothesis required by a check is not met.
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("io error: {0}")]
    Io(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

impl From<toml::de::Error> for Error {
    fn from(e: toml::de::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
