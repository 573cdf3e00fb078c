use thiserror::Error;

#[derive(Debug, Error)]
pub enum NormError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error(transparent)]
    Spectral(#[from] bflab_spectral::SpectralError),
}

pub type Result<T> = std::result::Result<T, NormError>;
