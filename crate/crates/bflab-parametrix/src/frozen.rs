//! Frozen-coefficient kernels G(x;t;ξ).
//!
//! Freezing the leading coefficient of Δ_g² at a base point ξ leaves the
//! constant-coefficient equation ∂_t u + a(ξ)∂_x⁴u = 0 with a(ξ) = g¹¹(ξ)²,
//! whose kernel is an exact rescaling of the unit-time Euclidean profile:
//!
//!   G(x; t; ξ) = λ⁻¹ B₀(x/λ),   λ = (a(ξ)·t)^{1/4}.
//!
//! Spatial derivatives pick up one factor of λ⁻¹ per order and the next
//! profile table; the time derivative follows from the same scaling,
//! ∂_t G = −(4t)⁻¹λ⁻¹[B₀(ρ) + ρB₁(ρ)], which gives a residual check that is
//! independent of the ∂⁴ route.

use bflab_kernel::MetricSpec;
use bflab_spectral::Grid;

use crate::error::{ParametrixError, Result};
use crate::profiles::{profiles, FrozenProfiles, MAX_ORDER};

#[derive(Clone, Debug)]
pub struct FrozenKernelFamily {
    metric: MetricSpec,
    grid: Grid,
    /// Conformal factor c(ξ) at the grid nodes.
    c: Vec<f64>,
    /// Frozen leading coefficient a(ξ) = c(ξ)⁻⁴.
    a: Vec<f64>,
    tables: &'static FrozenProfiles,
}

impl FrozenKernelFamily {
    pub fn new(metric: &MetricSpec) -> Result<Self> {
        if metric.dim() != 1 {
            return Err(ParametrixError::InvalidArgument(
                "frozen kernels are built for the one-dimensional torus".into(),
            ));
        }
        let field = metric.coefficient_field();
        let c: Vec<f64> = field.samples().to_vec();
        let a: Vec<f64> = c.iter().map(|&v| v.powi(-4)).collect();
        if a.iter().any(|&v| !v.is_finite() || v <= 0.0) {
            return Err(ParametrixError::InvalidArgument(
                "frozen coefficient a(ξ) must be positive and finite".into(),
            ));
        }
        Ok(FrozenKernelFamily {
            metric: metric.clone(),
            grid: field.grid().clone(),
            c,
            a,
            tables: profiles(),
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn metric(&self) -> &MetricSpec {
        &self.metric
    }

    /// Frozen coefficient a(ξ) at a grid node.
    pub fn coefficient(&self, node: usize) -> f64 {
        self.a[node]
    }

    /// Conformal factor c(ξ) at a grid node (the volume density).
    pub fn conformal_factor(&self, node: usize) -> f64 {
        self.c[node]
    }

    /// ∂_x^k G(x; t; ξ) for k ≤ 6, with ξ frozen at the given node.
    pub fn derivative(&self, k: usize, x: f64, t: f64, node: usize) -> Result<f64> {
        if !(t > 0.0) || !t.is_finite() {
            return Err(ParametrixError::InvalidArgument(format!(
                "frozen kernel needs t > 0, got {t}"
            )));
        }
        if k > MAX_ORDER {
            return Err(ParametrixError::InvalidArgument(format!(
                "profile tables stop at derivative order {MAX_ORDER}, got {k}"
            )));
        }
        let lambda = (self.a[node] * t).powf(0.25);
        Ok(self.tables.eval(k, x / lambda) / lambda.powi(1 + k as i32))
    }

    /// ∂_t G via the scaling identity −(4t)⁻¹λ⁻¹[B₀(ρ) + ρB₁(ρ)]. Uses only
    /// the order-0 and order-1 tables, so it is an independent route from
    /// −a·∂⁴G.
    pub fn time_derivative(&self, x: f64, t: f64, node: usize) -> Result<f64> {
        if !(t > 0.0) || !t.is_finite() {
            return Err(ParametrixError::InvalidArgument(format!(
                "frozen kernel needs t > 0, got {t}"
            )));
        }
        let lambda = (self.a[node] * t).powf(0.25);
        let rho = x / lambda;
        Ok(-(self.tables.eval(0, rho) + rho * self.tables.eval(1, rho)) / (4.0 * t * lambda))
    }

    /// max over ξ of |∫G(u;t;ξ)du − 1|, the integral taken over one period
    /// by the trapezoid rule. Meaningful when the kernel is resolved and its
    /// tail dies inside a half period; both are the caller's choice of t.
    pub fn mass_defect(&self, t: f64) -> Result<f64> {
        let n = self.grid.len();
        let h = self.grid.spacing();
        let half = 0.5 * self.grid.period();
        let mut worst = 0.0f64;
        for node in 0..n {
            let mut mass = 0.0;
            for i in 0..n {
                let u = -half + i as f64 * h;
                mass += self.derivative(0, u, t, node)? * h;
            }
            worst = worst.max((mass - 1.0).abs());
        }
        Ok(worst)
    }

    /// sup|(∂_t + a∂⁴)G| / sup|∂⁴G| with ∂⁴ taken spectrally from the
    /// sampled kernel and ∂_t from the scaling identity.
    pub fn spectral_residual(&self, t: f64, node: usize) -> Result<f64> {
        use bflab_spectral::SpectralField;
        let n = self.grid.len();
        let h = self.grid.spacing();
        let half = 0.5 * self.grid.period();
        let samples: Vec<f64> = (0..n)
            .map(|i| {
                let u = {
                    let mut v = i as f64 * h;
                    if v >= half {
                        v -= self.grid.period();
                    }
                    v
                };
                self.derivative(0, u, t, node)
            })
            .collect::<Result<_>>()?;
        let field = SpectralField::from_samples(self.grid.clone(), samples)?;
        let d4 = field.derivative(&[4])?;
        let a = self.a[node];
        let mut residual = 0.0f64;
        let mut scale = 0.0f64;
        for i in 0..n {
            let u = {
                let mut v = i as f64 * h;
                if v >= half {
                    v -= self.grid.period();
                }
                v
            };
            let dt = self.time_derivative(u, t, node)?;
            residual = residual.max((dt + a * d4.value(i)).abs());
            scale = scale.max(d4.value(i).abs());
        }
        Ok(residual / scale)
    }
}

/// G(x;t;ξ) with ξ snapped to the nearest grid node — the frozen family is a
/// per-node object by construction.
pub fn frozen_kernel(family: &FrozenKernelFamily, x: f64, t: f64, xi: f64) -> Result<f64> {
    let grid = family.grid();
    let n = grid.len() as i64;
    let node = ((xi / grid.spacing()).round() as i64).rem_euclid(n) as usize;
    family.derivative(0, x, t, node)
}
