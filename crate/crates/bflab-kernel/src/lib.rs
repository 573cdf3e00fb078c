//! Biharmonic heat kernels: explicit Euclidean profiles, flat-torus series,
//! the integral constants ν_k, decay-envelope fits, and the dense
//! matrix-exponential reference kernel used as ground truth elsewhere.

mod bessel;
mod decay;
mod error;
mod flat;
mod metric;
mod nu;
mod profile;
mod quad;
mod reference;
mod rescale;
mod table;

pub use bessel::{bessel_j, bessel_j0_derivative};
pub use decay::{decay_fit, gaussian_control_profile, DecayFit};
pub use error::{KernelError, Result};
pub use flat::{displacement_row, flat_torus_kernel};
pub use metric::{MetricKind, MetricSpec};
pub use nu::{euclidean_mass, nu_constant, nu_constant_truncated, nu_integral_at_time};
pub use profile::{euclidean_kernel_profile, euclidean_point, KernelProfile};
pub use quad::{composite_gl16, gl16, gl16_points, integrate_refining};
pub use reference::{reference_kernel, ReferenceOperator};
pub use rescale::{rescaling_convergence, RescalePoint, RescaleReport};
pub use table::{Construction, KernelTable, Operator};
