use thiserror::Error;

#[derive(Debug, Error)]
pub enum ParametrixError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    /// The chart cover or cutoff system cannot be built with the requested
    /// layout (e.g. cutoff supports would wrap around the torus).
    #[error("construction failure: {0}")]
    Construction(String),
    /// The defect series stopped contracting; the horizon or the metric
    /// perturbation is too large for the Neumann iteration.
    #[error("series divergence: {0}")]
    Divergence(String),
    #[error("numerical failure: {0}")]
    NumericalFailure(String),
    #[error(transparent)]
    Spectral(#[from] bflab_spectral::SpectralError),
    #[error(transparent)]
    Kernel(#[from] bflab_kernel::KernelError),
}

pub type Result<T> = std::result::Result<T, ParametrixError>;
