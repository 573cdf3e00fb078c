//! ∂_t on nonuniform (geometric) time grids by three-point Lagrange
//! differentiation: exact for trajectories quadratic in t, one-sided at the
//! ends, centered inside.

use bflab_spectral::{SpaceTimeField, SpectralField};

use crate::error::{NormError, Result};

/// Derivative of the Lagrange interpolant through (ta, fa), (tb, fb), (tc, fc)
/// evaluated at te.
fn three_point(
    ta: f64,
    tb: f64,
    tc: f64,
    te: f64,
    fa: &SpectralField,
    fb: &SpectralField,
    fc: &SpectralField,
) -> Result<SpectralField> {
    let wa = (2.0 * te - tb - tc) / ((ta - tb) * (ta - tc));
    let wb = (2.0 * te - ta - tc) / ((tb - ta) * (tb - tc));
    let wc = (2.0 * te - ta - tb) / ((tc - ta) * (tc - tb));
    Ok(fa.scale(wa).add(&fb.scale(wb))?.add(&fc.scale(wc))?)
}

/// Slice-wise ∂_t u on the trajectory's own time grid.
pub fn time_derivative(u: &SpaceTimeField) -> Result<SpaceTimeField> {
    let m = u.len();
    if m < 3 {
        return Err(NormError::InsufficientData(format!(
            "time differentiation needs at least 3 slices, got {m}"
        )));
    }
    let t = u.times();
    let slices: Result<Vec<SpectralField>> = (0..m)
        .map(|j| {
            let (a, b, c) = if j == 0 {
                (0, 1, 2)
            } else if j == m - 1 {
                (m - 3, m - 2, m - 1)
            } else {
                (j - 1, j, j + 1)
            };
            three_point(t[a], t[b], t[c], t[j], u.slice(a), u.slice(b), u.slice(c))
        })
        .collect();
    Ok(SpaceTimeField::new(u.times().to_vec(), slices?)?)
}
