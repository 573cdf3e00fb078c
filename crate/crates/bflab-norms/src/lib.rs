//! Weighted parabolic Hölder norm estimators.
//!
//! The spaces Y_T and X_T weigh each spatial/temporal seminorm by the power
//! of t under which bounded-second-derivative initial data stays finite;
//! this crate estimates those norms on sampled trajectories and produces the
//! weighted smoothing profiles t^{l+k/4}‖∂_t^l ∇^k ∂∂̄ u(t)‖₀.

mod error;
mod norms;
mod report;
mod smoothing;
mod tensor;
mod time_deriv;

pub use error::{NormError, Result};
pub use norms::{x_norm, x_prime_extra_terms, y_norm};
pub use report::NormReport;
pub use smoothing::{smoothing_profile, SmoothingProfile, SmoothingRow};
pub use tensor::{complex_hessian, derivative_components, sup_component_magnitude, sup_tensor_norm};
pub use time_deriv::time_derivative;
