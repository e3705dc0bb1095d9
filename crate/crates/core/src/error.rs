use thiserror::Error;

/// Errors raised by the operators and verifiers in this crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("missing tail model: {0}")]
    MissingTailModel(String),
    #[error("map leaves the target manifold (max deviation {0:.3e})")]
    OffManifold(f64),
    #[error("aliasing risk: {0}")]
    Aliasing(String),
    #[error("under-resolved: {0}")]
    UnderResolved(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}
