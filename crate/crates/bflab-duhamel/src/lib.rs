//! Solution operators for the biharmonic heat flow on the torus: the
//! initial-value propagator S_g(t) = e^{−tΔ_g²}, the singular volume
//! potential V[f](t) = ∫₀ᵗ S_g(t−s) f(s) ds, and the uniform Schauder-ratio
//! experiment ‖V[f]‖_{X_T} / ‖f‖_{Y_T} built on top of them. Rough-data
//! generators for the smoothing experiments live here too.

mod error;
mod io;
mod potential;
mod propagator;
mod quadrature;
mod rough;
mod schauder;
mod source;

pub use error::{DuhamelError, Result};
pub use io::write_trajectory_csv;
pub use potential::{volume_potential, QUADRATURE_PANELS_PER_SIDE, QUADRATURE_REL_TOL};
pub use propagator::Propagator;
pub use rough::{
    band_limit, random_c11_data, sawtooth_data, triangle_data, weierstrass_data,
};
pub use schauder::{schauder_ratio, write_ratio_csv, SchauderRatioRecord};
