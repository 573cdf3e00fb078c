//! Covariant tensor helpers on flat charts: the components of ∇^k f with
//! their multiplicity weights, pointwise Frobenius magnitudes, and the
//! complex Hessian ∂∂̄ = Δ/4.

use bflab_spectral::SpectralField;

use crate::error::Result;

fn binomial(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    let mut acc = 1.0f64;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc
}

/// Scalar components of ∇^k f with the multiplicities that make
/// Σ w_i c_i² the squared tensor Frobenius norm. One component on a line,
/// the k+1 distinct mixed derivatives in the plane.
pub fn derivative_components(field: &SpectralField, k: usize) -> Result<Vec<(SpectralField, f64)>> {
    if k == 0 {
        return Ok(vec![(field.clone(), 1.0)]);
    }
    match field.grid().dim() {
        1 => Ok(vec![(field.derivative(&[k])?, 1.0)]),
        _ => (0..=k)
            .map(|a| Ok((field.derivative(&[a, k - a])?, binomial(k, a))))
            .collect(),
    }
}

/// sup over nodes of |∇^k f|, the pointwise tensor magnitude.
pub fn sup_tensor_norm(field: &SpectralField, k: usize) -> Result<f64> {
    let components = derivative_components(field, k)?;
    Ok(sup_component_magnitude(&components))
}

/// sup over nodes of sqrt(Σ w_i c_i²) for ready-made components.
pub fn sup_component_magnitude(components: &[(SpectralField, f64)]) -> f64 {
    let nodes = components[0].0.samples().len();
    let mut worst = 0.0f64;
    for j in 0..nodes {
        let mut mag2 = 0.0;
        for (c, w) in components {
            let v = c.samples()[j];
            mag2 += w * v * v;
        }
        worst = worst.max(mag2);
    }
    worst.sqrt()
}

/// ∂∂̄ f on a flat chart: a quarter of the Laplacian.
pub fn complex_hessian(field: &SpectralField) -> Result<SpectralField> {
    Ok(field.laplacian().scale(0.25))
}
