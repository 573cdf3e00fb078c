//! The singular volume potential V[f](t) = ∫₀ᵗ S(t−s) f(s) ds.
//!
//! The integral is evaluated independently at each of the source's sample
//! times with the endpoint-graded rule from [`crate::quadrature`]; the
//! source between samples comes from the per-mode power-law interpolant.
//! Every run is done twice, at the base panel count and at double, and the
//! two results must agree — a source rough enough to defeat the graded rule
//! is reported as a numerical failure rather than silently smoothed over.

use bflab_spectral::{SpaceTimeField, SpectralField};
use rayon::prelude::*;

use crate::error::{DuhamelError, Result};
use crate::propagator::Propagator;
use crate::quadrature::graded_nodes;
use crate::source::SourceInterpolant;

/// Composite GL16 panels per graded side at the base resolution; the defect
/// guard doubles this once.
pub const QUADRATURE_PANELS_PER_SIDE: usize = 6;
/// Largest acceptable sup-norm disagreement between the base and doubled
/// panel counts, relative to the potential's overall scale.
pub const QUADRATURE_REL_TOL: f64 = 1e-8;

pub fn volume_potential(
    propagator: &Propagator,
    f: &SpaceTimeField,
    horizon: f64,
) -> Result<SpaceTimeField> {
    if f.grid() != propagator.grid() {
        return Err(DuhamelError::InvalidArgument(
            "source grid does not match the propagator grid".into(),
        ));
    }
    if !propagator.supports_arbitrary_times() {
        return Err(DuhamelError::ExplicitTimes(
            "the volume potential evaluates S(t−s) at quadrature nodes; a row table \
             carries only its own times"
                .into(),
        ));
    }
    if !(horizon.is_finite() && horizon > 0.0) {
        return Err(DuhamelError::InvalidArgument(format!(
            "horizon must be positive and finite, got {horizon}"
        )));
    }
    let times = f.times();
    if *times.last().expect("nonempty trajectory") > horizon * (1.0 + 1e-12) {
        return Err(DuhamelError::InvalidArgument(
            "source is sampled beyond the requested horizon".into(),
        ));
    }
    for (j, slice) in f.slices().iter().enumerate() {
        if !slice.sup_norm().is_finite() {
            return Err(DuhamelError::InvalidArgument(format!(
                "source slice at t = {} is not finite",
                times[j]
            )));
        }
    }

    let interp = SourceInterpolant::new(f);
    let coarse = integrate_all(propagator, &interp, times, QUADRATURE_PANELS_PER_SIDE)?;
    let fine = integrate_all(propagator, &interp, times, 2 * QUADRATURE_PANELS_PER_SIDE)?;

    let scale = fine.iter().map(|v| v.sup_norm()).fold(0.0f64, f64::max);
    let mut defect = 0.0f64;
    for (lo, hi) in coarse.iter().zip(&fine) {
        defect = defect.max(lo.sub(hi)?.sup_norm());
    }
    if defect > QUADRATURE_REL_TOL * scale {
        return Err(DuhamelError::NumericalFailure(format!(
            "Duhamel quadrature defect {defect:.3e} exceeds {QUADRATURE_REL_TOL:.1e} × scale \
             {scale:.3e}; the source is too rough for the graded rule"
        )));
    }
    Ok(SpaceTimeField::new(times.to_vec(), fine)?)
}

fn integrate_all(
    propagator: &Propagator,
    interp: &SourceInterpolant,
    times: &[f64],
    panels: usize,
) -> Result<Vec<SpectralField>> {
    let grid = propagator.grid();
    times
        .par_iter()
        .map(|&t| {
            let mut acc = vec![0.0f64; grid.len()];
            for node in graded_nodes(t, panels) {
                let fs = interp.eval(grid, node.s)?;
                let propagated = propagator.apply(&fs, node.remaining)?;
                for (a, v) in acc.iter_mut().zip(propagated.samples()) {
                    *a += node.weight * v;
                }
            }
            Ok(SpectralField::from_samples(grid.clone(), acc)?)
        })
        .collect()
}
