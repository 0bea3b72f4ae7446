use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// A parameter fell outside its admissible range.
    #[error("range error: {0}")]
    Range(String),

    /// A sequence had the wrong length (e.g. not a power of two).
    #[error("shape error: {0}")]
    Shape(String),

    /// A requested size exceeds what the operation supports.
    #[error("capacity error: {0}")]
    Capacity(String),

    /// A C1 puncturing table whose punctured code bits cannot be forced
    /// to a fixed value by freezing source bits.
    #[error("invalid shortening pattern: punctured code bits are not determined by the frozen source bits")]
    InvalidShortening,

    /// Two inputs that must describe the same object disagree.
    #[error("consistency error: {0}")]
    Consistency(String),

    /// A spectrum distance was requested for an empty spectrum.
    #[error("spectrum distance undefined: spectrum has no surviving paths")]
    UndefinedDistance,
}

pub type Result<T> = std::result::Result<T, Error>;
