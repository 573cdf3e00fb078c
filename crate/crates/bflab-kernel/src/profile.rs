//! Euclidean biharmonic heat kernel profiles via the radial Fourier integral.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::bessel::bessel_j0_derivative;
use crate::error::{KernelError, Result};
use crate::quad::integrate_refining;

/// Radial samples of D^k b₀(·;t) (k-th derivative along the radius).
#[derive(Debug, Clone)]
pub struct KernelProfile {
    dim: usize,
    deriv_order: usize,
    t: f64,
    radii: Vec<f64>,
    values: Vec<f64>,
}

impl KernelProfile {
    pub fn new(dim: usize, deriv_order: usize, t: f64, radii: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if !(dim == 1 || dim == 2) {
            return Err(KernelError::InvalidArgument(format!("dim must be 1 or 2, got {dim}")));
        }
        if !(t > 0.0) {
            return Err(KernelError::InvalidArgument(format!("t must be positive, got {t}")));
        }
        if radii.len() != values.len() || radii.is_empty() {
            return Err(KernelError::InvalidArgument(
                "radii and values must be equal-length and nonempty".into(),
            ));
        }
        if radii[0] < 0.0 || radii.windows(2).any(|w| w[1] <= w[0]) {
            return Err(KernelError::InvalidArgument(
                "radii must be nonnegative and strictly increasing".into(),
            ));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(KernelError::NumericalFailure("non-finite profile value".into()));
        }
        Ok(KernelProfile { dim, deriv_order, t, radii, values })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn deriv_order(&self) -> usize {
        self.deriv_order
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("radius,value\n");
        for (r, v) in self.radii.iter().zip(&self.values) {
            out.push_str(&format!("{r:.16e},{v:.16e}\n"));
        }
        out
    }
}

/// D^k b₀ at the given radii by adaptive oscillatory quadrature.
pub fn euclidean_kernel_profile(dim: usize, k: usize, t: f64, radii: &[f64]) -> Result<KernelProfile> {
    if !(t > 0.0) {
        return Err(KernelError::InvalidArgument(format!("t must be positive, got {t}")));
    }
    let values: Result<Vec<f64>> = radii
        .par_iter()
        .map(|&r| euclidean_point(dim, k, t, r))
        .collect();
    KernelProfile::new(dim, k, t, radii.to_vec(), values?)
}

/// Single profile value.
///
/// 1-D: D^k b₀(x;t) = (1/π)∫₀^∞ ξ^k e^{−ξ⁴t} cos(ξx + kπ/2) dξ.
/// 2-D: (d/dr)^k b₀(r;t) = (1/2π)∫₀^∞ ρ^{k+1} e^{−ρ⁴t} J₀^(k)(ρr) dρ.
pub fn euclidean_point(dim: usize, k: usize, t: f64, r: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(KernelError::InvalidArgument(format!("t must be positive, got {t}")));
    }
    if r < 0.0 {
        return Err(KernelError::InvalidArgument(format!("radius must be nonnegative, got {r}")));
    }
    match dim {
        1 => {
            let phase = 0.5 * PI * k as f64;
            let f = |xi: f64| (-xi.powi(4) * t).exp() * xi.powi(k as i32) * (xi * r + phase).cos();
            Ok(oscillatory_integral(&f, t, k, r)? / PI)
        }
        2 => {
            let f = |rho: f64| {
                (-rho.powi(4) * t).exp() * rho.powi(k as i32 + 1) * bessel_j0_derivative(k, rho * r)
            };
            Ok(oscillatory_integral(&f, t, k + 1, r)? / (2.0 * PI))
        }
        _ => Err(KernelError::InvalidArgument(format!("dim must be 1 or 2, got {dim}"))),
    }
}

/// ∫₀^∞ of a ξ^moment e^{−ξ⁴t}-enveloped integrand oscillating at spatial
/// scale `osc_scale`. Panels resolve the quarter wavelength; the range is
/// split at the stationary-phase scale (|x|/4t)^{1/3} before refining.
pub(crate) fn oscillatory_integral<F: Fn(f64) -> f64>(
    f: &F,
    t: f64,
    moment: usize,
    osc_scale: f64,
) -> Result<f64> {
    let cutoff = upper_cutoff(t, moment);
    let mut edges = vec![0.0];
    let split = (osc_scale.abs() / (4.0 * t)).powf(1.0 / 3.0);
    if split > 0.05 * cutoff && split < 0.95 * cutoff {
        edges.push(split);
    }
    edges.push(cutoff);

    let scale = t.powf(-((moment as f64) + 1.0) / 4.0);
    let tol = 1e-12 * scale;
    let quarter_wave = PI / (2.0 * osc_scale.abs().max(1e-12));
    let mut total = 0.0;
    for seg in edges.windows(2) {
        let (a, b) = (seg[0], seg[1]);
        let len = b - a;
        let width = quarter_wave.min(len / 4.0);
        let initial = ((len / width).ceil() as usize).clamp(4, 1 << 14);
        total += integrate_refining(f, a, b, initial, tol, 8, "kernel profile integral")?;
    }
    Ok(total)
}

/// Smallest Ξ with ξ^moment e^{−ξ⁴t} ≤ 1e-20 beyond it.
fn upper_cutoff(t: f64, moment: usize) -> f64 {
    let target = 46.1_f64;
    let mut xi = (target / t).powf(0.25);
    for _ in 0..5 {
        let corr = moment as f64 * xi.max(1.0).ln();
        xi = ((target + corr) / t).powf(0.25);
    }
    xi
}
