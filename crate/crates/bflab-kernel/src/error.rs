use thiserror::Error;

#[derive(Debug, Error)]
pub enum KernelError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("numerical failure: {0}")]
    NumericalFailure(String),
    #[error("resolution exceeded: {0}")]
    ResolutionExceeded(String),
    #[error("fit window: {0}")]
    FitWindow(String),
    #[error(transparent)]
    Spectral(#[from] bflab_spectral::SpectralError),
}

pub type Result<T> = std::result::Result<T, KernelError>;
