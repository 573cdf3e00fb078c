use thiserror::Error;

#[derive(Debug, Error)]
pub enum DuhamelError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    /// A table-backed propagator was asked for a time it does not carry.
    /// Tables are never interpolated in time; rebuild with the times you need.
    #[error("explicit-times violation: {0}")]
    ExplicitTimes(String),
    #[error("numerical failure: {0}")]
    NumericalFailure(String),
    #[error(transparent)]
    Spectral(#[from] bflab_spectral::SpectralError),
    #[error(transparent)]
    Kernel(#[from] bflab_kernel::KernelError),
    #[error(transparent)]
    Norm(#[from] bflab_norms::NormError),
}

pub type Result<T> = std::result::Result<T, DuhamelError>;
