//! Levi parametrix for the biharmonic heat kernel on perturbed metrics.
//!
//! The exact kernel of ∂_t + Δ_g² on a curved circle is built in four steps,
//! each a module here:
//!
//! 1. freeze the operator's leading coefficient chart-by-chart and glue the
//!    resulting constant-coefficient kernels with a partition of unity
//!    ([`build_parametrix`]);
//! 2. apply the true operator to that parametrix and keep the remainder,
//!    split into its freezing / lower-order / cutoff groups ([`defect`]);
//! 3. solve the integral equation Ψ = K + K∗Ψ by Neumann iteration, with
//!    measured stopping and a residual audit ([`neumann_series`]);
//! 4. assemble b = Z + Z∗Ψ and validate it against the semigroup oracle
//!    ([`assemble_kernel`], [`validate_assembly`]).
//!
//! The space–time convolution underneath ([`spacetime_convolve`]) grades its
//! quadrature with the quartic substitution s = t·σ⁴ and closes the
//! under-resolved slivers near s = 0 and s = t with moment models that stay
//! linear in both factors, so the Neumann algebra holds to rounding.

mod assemble;
mod charts;
mod convolve;
mod defect;
mod error;
mod frozen;
mod jet;
mod neumann;
mod operator;
mod parametrix;
mod profiles;

pub use assemble::{
    assemble_kernel, validate_assembly, ValidationReport, ValidationRow, MASS_TOL, PDE_TOL,
    ROW_L1_TOL,
};
pub use charts::ChartCover;
pub use convolve::{
    measured_singularity, measured_singularity_in, quadrature_nodes, resolution_floor,
    spacetime_convolve, SpaceTimeTable, TimeKernel,
};
pub use defect::{defect, DefectGroup, DefectTable};
pub use error::{ParametrixError, Result};
pub use frozen::{frozen_kernel, FrozenKernelFamily};
pub use neumann::{neumann_series, IterateRecord, NeumannSeries};
pub use parametrix::{build_parametrix, resolved_time_grid, ParametrixTable};
