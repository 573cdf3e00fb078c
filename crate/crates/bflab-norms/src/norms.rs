//! The weighted parabolic Hölder norms ‖·‖_{Y_T} and ‖·‖_{X_T}, estimated on
//! sampled trajectories. Every term is a sup over the time grid (and over
//! sampled node pairs for the Hölder parts), so the estimators are lower
//! bounds of the continuum norms; downstream checks are framed as ratios or
//! boundedness, never exact norm values.

use std::collections::BTreeMap;

use rayon::prelude::*;

use bflab_spectral::{holder_seminorm, holder_seminorm_tensor, SpaceTimeField, SpectralField};

use crate::error::{NormError, Result};
use crate::report::NormReport;
use crate::tensor::{derivative_components, sup_component_magnitude, sup_tensor_norm};
use crate::time_deriv::time_derivative;

/// Time-Hölder pairs reach at most this many grid steps ahead: the sup over
/// all h is dominated by h ≍ t under the weight structure, and exhaustive
/// pairs are wasteful.
const MAX_PAIR_SKIP: usize = 3;
/// Fewest slices on which the estimators are meaningful (the time stencils
/// need three and the pair terms need one more).
const MIN_SLICES: usize = 4;

fn validate(u: &SpaceTimeField, alpha: f64, t_cap: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(NormError::InvalidArgument(format!(
            "alpha must lie in (0,1), got {alpha}"
        )));
    }
    if u.len() < MIN_SLICES {
        return Err(NormError::InsufficientData(format!(
            "norm estimation needs at least {MIN_SLICES} time slices, got {}",
            u.len()
        )));
    }
    let t_last = *u.times().last().unwrap();
    if t_last > t_cap {
        return Err(NormError::InvalidArgument(format!(
            "slice times must lie in (0, T]; last slice at {t_last} exceeds T = {t_cap}"
        )));
    }
    Ok(())
}

fn pairs(m: usize) -> Vec<(usize, usize)> {
    (0..m)
        .flat_map(|j| (j + 1..m.min(j + 1 + MAX_PAIR_SKIP)).map(move |j2| (j, j2)))
        .collect()
}

/// max over slices of weight(t)·value(slice).
fn sup_over_slices(u: &SpaceTimeField, weight_value: impl Fn(f64, &SpectralField) -> f64 + Sync) -> f64 {
    u.times()
        .par_iter()
        .zip(u.slices().par_iter())
        .map(|(&t, s)| weight_value(t, s))
        .reduce(|| 0.0, f64::max)
}

/// max over grid pairs (t, t+h) of t^{p}·h^{−α/4}·diff(j, j′).
fn sup_over_pairs(
    times: &[f64],
    power: f64,
    alpha: f64,
    diff: impl Fn(usize, usize) -> f64 + Sync,
) -> f64 {
    pairs(times.len())
        .par_iter()
        .map(|&(j, j2)| {
            let h = times[j2] - times[j];
            times[j].powf(power) * diff(j, j2) / h.powf(alpha / 4.0)
        })
        .reduce(|| 0.0, f64::max)
}

/// ‖f‖_{Y_T}: weighted sup, weighted spatial Hölder seminorm, and the
/// weighted time-Hölder quotient, each maximized over the trajectory.
pub fn y_norm(f: &SpaceTimeField, alpha: f64, t_cap: f64) -> Result<NormReport> {
    validate(f, alpha, t_cap)?;
    let mut terms = BTreeMap::new();
    terms.insert(
        "weighted_sup".to_string(),
        sup_over_slices(f, |t, s| t.sqrt() * s.sup_norm()),
    );
    terms.insert(
        "weighted_space_holder".to_string(),
        sup_over_slices(f, |t, s| {
            t.powf(0.5 + alpha / 4.0) * holder_seminorm(s, alpha).expect("validated alpha")
        }),
    );
    terms.insert(
        "time_holder".to_string(),
        sup_over_pairs(f.times(), 0.5 + alpha / 4.0, alpha, |j, j2| {
            f.slice(j2).sub(f.slice(j)).expect("shared grid").sup_norm()
        }),
    );
    Ok(NormReport::new(terms, alpha, t_cap, f.times().to_vec(), f.grid().clone()))
}

/// ‖u‖_{X_T}: the five weighted derivative sups, the weighted spatial Hölder
/// seminorms of ∇⁴u and ∂_t u, the weighted sup of ∂_t u, and the two
/// weighted time-Hölder quotients (of ∇⁴u and ∂_t u).
pub fn x_norm(u: &SpaceTimeField, alpha: f64, t_cap: f64) -> Result<NormReport> {
    validate(u, alpha, t_cap)?;
    let times = u.times().to_vec();
    let du = time_derivative(u)?;

    let mut terms = BTreeMap::new();
    for k in 0..=4usize {
        terms.insert(
            format!("grad{k}_sup"),
            sup_over_slices(u, |t, s| {
                t.powf(-0.5 + k as f64 / 4.0) * sup_tensor_norm(s, k).expect("valid order")
            }),
        );
    }

    // ∇⁴u components per slice, shared by the spatial and time Hölder terms.
    let comps4: Vec<Vec<(SpectralField, f64)>> = u
        .slices()
        .par_iter()
        .map(|s| derivative_components(s, 4).expect("valid order"))
        .collect();
    let holder4: f64 = times
        .par_iter()
        .zip(comps4.par_iter())
        .map(|(&t, comps)| {
            let refs: Vec<(&SpectralField, f64)> = comps.iter().map(|(c, w)| (c, *w)).collect();
            t.powf(0.5 + alpha / 4.0) * holder_seminorm_tensor(&refs, alpha).expect("validated")
        })
        .reduce(|| 0.0, f64::max);
    terms.insert("grad4_space_holder".to_string(), holder4);

    terms.insert("dt_sup".to_string(), sup_over_slices(&du, |t, s| t.sqrt() * s.sup_norm()));
    terms.insert(
        "dt_space_holder".to_string(),
        sup_over_slices(&du, |t, s| {
            t.powf(0.5 + alpha / 4.0) * holder_seminorm(s, alpha).expect("validated alpha")
        }),
    );

    terms.insert(
        "grad4_time_holder".to_string(),
        sup_over_pairs(&times, 0.5 + alpha / 4.0, alpha, |j, j2| {
            let diff: Vec<(SpectralField, f64)> = comps4[j2]
                .iter()
                .zip(&comps4[j])
                .map(|((c2, w), (c1, _))| (c2.sub(c1).expect("shared grid"), *w))
                .collect();
            sup_component_magnitude(&diff)
        }),
    );
    terms.insert(
        "dt_time_holder".to_string(),
        sup_over_pairs(&times, 0.5 + alpha / 4.0, alpha, |j, j2| {
            du.slice(j2).sub(du.slice(j)).expect("shared grid").sup_norm()
        }),
    );

    Ok(NormReport::new(terms, alpha, t_cap, times, u.grid().clone()))
}

/// The four extra time-Hölder terms of the equivalent norm ‖·‖′_{X_T}:
/// t^{−1/2+k/4+α/4} h^{−α/4} ‖∇^k u(t+h) − ∇^k u(t)‖ for k = 0..3. Reported
/// separately so equivalence can be checked as a ratio against the X_T total.
pub fn x_prime_extra_terms(
    u: &SpaceTimeField,
    alpha: f64,
    t_cap: f64,
) -> Result<BTreeMap<String, f64>> {
    validate(u, alpha, t_cap)?;
    let times = u.times().to_vec();
    let mut terms = BTreeMap::new();
    for k in 0..=3usize {
        let comps: Vec<Vec<(SpectralField, f64)>> = u
            .slices()
            .par_iter()
            .map(|s| derivative_components(s, k).expect("valid order"))
            .collect();
        terms.insert(
            format!("grad{k}_time_holder"),
            sup_over_pairs(&times, -0.5 + k as f64 / 4.0 + alpha / 4.0, alpha, |j, j2| {
                let diff: Vec<(SpectralField, f64)> = comps[j2]
                    .iter()
                    .zip(&comps[j])
                    .map(|((c2, w), (c1, _))| (c2.sub(c1).expect("shared grid"), *w))
                    .collect();
                sup_component_magnitude(&diff)
            }),
        );
    }
    Ok(terms)
}
