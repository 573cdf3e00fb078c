//! Dense matrix-exponential reference kernel for Δ_g² on the 1-D torus.
//!
//! The metric g = c²dx² gives Δ_g u = c⁻¹(c⁻¹u′)′. With the antisymmetric
//! spectral differentiation matrix D, the similarity transform
//! S = C^{-1/2} D C^{-1} D C^{-1/2} is exactly symmetric and negative
//! semidefinite, so exp(−t Δ_g²) follows from one symmetric eigensolve with
//! rates μ² — no matrix squaring, no sign ambiguity.
//!
//! D annihilates both the constant vector and the Nyquist checkerboard, so S
//! has a two-dimensional null space. Left alone, the checkerboard component
//! would never decay and the kernel would carry a persistent grid-scale
//! artifact. The null basis is therefore rotated so that C^{1/2}·1 keeps rate
//! exactly 0 (mass is conserved to machine precision) while the orthogonal
//! direction receives the flat Nyquist rate ξ_Nyq⁴, matching the truncated
//! Fourier series in the flat case.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use bflab_spectral::{Grid, SpectralField};

use crate::error::{KernelError, Result};
use crate::metric::MetricSpec;
use crate::table::{Construction, KernelTable, Operator};

const MAX_POINTS: usize = 512;

pub fn reference_kernel(metric: &MetricSpec, grid: &Grid, times: &[f64]) -> Result<KernelTable> {
    ReferenceOperator::new(metric, grid)?.kernel_table(times)
}

/// Eigendecomposition of Δ_g² on a 1-D torus, reusable across times.
///
/// Where [`reference_kernel`] bakes the semigroup into a table at fixed
/// times, this keeps the factors so e^{−tΔ_g²} can be applied to a field at
/// any t ≥ 0 — which is what Duhamel quadrature needs, since the node times
/// t − s never land on a pre-agreed grid.
pub struct ReferenceOperator {
    grid: Grid,
    metric: MetricSpec,
    sqrt_c: Vec<f64>,
    decomp: BilaplacianEigensystem,
}

impl ReferenceOperator {
    pub fn new(metric: &MetricSpec, grid: &Grid) -> Result<Self> {
        if grid.dim() != 1 {
            return Err(KernelError::InvalidArgument("reference kernel is one-dimensional".into()));
        }
        if grid.points_per_axis() > MAX_POINTS {
            return Err(KernelError::InvalidArgument(format!(
                "grid has {} points; dense eigendecomposition is capped at {MAX_POINTS}",
                grid.points_per_axis()
            )));
        }
        if metric.grid() != grid {
            return Err(KernelError::InvalidArgument(
                "metric profile and kernel grid must coincide".into(),
            ));
        }
        let c = metric.coefficient_field().samples().to_vec();
        let decomp = bilaplacian_eigensystem(grid, &c)?;
        let sqrt_c = c.iter().map(|v| v.sqrt()).collect();
        Ok(Self { grid: grid.clone(), metric: metric.clone(), sqrt_c, decomp })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn metric(&self) -> &MetricSpec {
        &self.metric
    }

    /// Apply e^{−tΔ_g²} to a field: C^{-1/2} Q e^{−tλ} Qᵀ C^{1/2} u.
    pub fn propagate(&self, u: &SpectralField, t: f64) -> Result<SpectralField> {
        if u.grid() != &self.grid {
            return Err(KernelError::InvalidArgument(
                "field grid does not match the operator grid".into(),
            ));
        }
        if !t.is_finite() || t < 0.0 {
            return Err(KernelError::InvalidArgument(format!("time must be >= 0, got {t}")));
        }
        let n = self.grid.points_per_axis();
        let v = DVector::from_fn(n, |i, _| self.sqrt_c[i] * u.value(i));
        let mut spectral = self.decomp.q.transpose() * v;
        for (j, &lambda) in self.decomp.rates.iter().enumerate() {
            spectral[j] *= (-lambda * t).exp();
        }
        let w = &self.decomp.q * spectral;
        let samples: Vec<f64> = (0..n).map(|i| w[i] / self.sqrt_c[i]).collect();
        Ok(SpectralField::from_samples(self.grid.clone(), samples)?)
    }

    /// Bake the semigroup into a row table at the given times.
    pub fn kernel_table(&self, times: &[f64]) -> Result<KernelTable> {
        let n = self.grid.points_per_axis();
        let h = self.grid.spacing();
        let sqrt_c = &self.sqrt_c;
        let weights: Vec<f64> = sqrt_c.iter().map(|v| v * v * h).collect();
        let matrices: Vec<DMatrix<f64>> = times
            .par_iter()
            .map(|&t| {
                // K = Q e^{−tλ} Qᵀ, then b_ij = K_ij / (√(c_i c_j) h).
                let mut scaled = self.decomp.q.clone();
                for (j, &lambda) in self.decomp.rates.iter().enumerate() {
                    let factor = (-lambda * t).exp();
                    scaled.column_mut(j).scale_mut(factor);
                }
                let k = &scaled * self.decomp.q.transpose();
                DMatrix::from_fn(n, n, |i, j| {
                    0.5 * (k[(i, j)] + k[(j, i)]) / (sqrt_c[i] * sqrt_c[j] * h)
                })
            })
            .collect();

        KernelTable::from_dense(
            self.grid.clone(),
            times.to_vec(),
            weights,
            matrices,
            if self.metric.is_flat() { Operator::Flat } else { Operator::Perturbed },
            Construction::MatrixExponential,
        )
    }
}

pub(crate) struct BilaplacianEigensystem {
    /// Orthonormal eigenvectors of S (columns), after the null-space rotation.
    pub q: DMatrix<f64>,
    /// Rates λ = μ² of Δ_g² (surgery slots: 0 for mass, ξ_Nyq⁴ for checkerboard).
    pub rates: Vec<f64>,
}

pub(crate) fn bilaplacian_eigensystem(grid: &Grid, c: &[f64]) -> Result<BilaplacianEigensystem> {
    let n = grid.points_per_axis();
    let d1 = differentiation_matrix(n, grid.period());
    let inv_c = DVector::from_iterator(n, c.iter().map(|v| 1.0 / v));
    let inv_sqrt_c = DVector::from_iterator(n, c.iter().map(|v| 1.0 / v.sqrt()));

    // S = C^{-1/2} D C^{-1} D C^{-1/2}, symmetrized against roundoff.
    let mut a = &d1 * DMatrix::from_diagonal(&inv_c) * &d1;
    for i in 0..n {
        for j in 0..n {
            a[(i, j)] *= inv_sqrt_c[i] * inv_sqrt_c[j];
        }
    }
    let s = DMatrix::from_fn(n, n, |i, j| 0.5 * (a[(i, j)] + a[(j, i)]));

    let eigen = s.symmetric_eigen();
    let mu = eigen.eigenvalues;
    let mut q = eigen.eigenvectors;

    // Locate the two-dimensional null space.
    let mu_max = mu.iter().fold(0.0f64, |m, &v| m.max(v.abs()));
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| mu[i].abs().partial_cmp(&mu[j].abs()).unwrap());
    let (null_a, null_b) = (order[0], order[1]);
    let null_tol = 1e-9 * mu_max;
    if mu[null_a].abs() > null_tol || mu[null_b].abs() > null_tol || mu[order[2]].abs() <= null_tol
    {
        return Err(KernelError::NumericalFailure(format!(
            "expected exactly two null modes of S; smallest |μ| = {:.3e}, {:.3e}, {:.3e} \
             against tolerance {null_tol:.3e}",
            mu[null_a].abs(),
            mu[null_b].abs(),
            mu[order[2]].abs()
        )));
    }

    // Rotate the null basis: C^{1/2}·1 (mass, rate 0) and its orthogonal
    // complement in the null space (checkerboard, flat Nyquist rate).
    let mass: DVector<f64> = DVector::from_iterator(n, c.iter().map(|v| v.sqrt())).normalize();
    let mut checker = DVector::from_fn(n, |i, _| {
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        sign * c[i].sqrt()
    });
    checker -= &mass * mass.dot(&checker);
    let checker = checker.normalize();

    // The rotated pair must still span the computed null space.
    for v in [&mass, &checker] {
        let pa = q.column(null_a).dot(v);
        let pb = q.column(null_b).dot(v);
        let residual = (1.0 - pa * pa - pb * pb).abs();
        if residual > 1e-8 {
            return Err(KernelError::NumericalFailure(format!(
                "null-space rotation residual {residual:.3e}; surgery basis does not span"
            )));
        }
    }
    q.set_column(null_a, &mass);
    q.set_column(null_b, &checker);

    let xi_nyq = 2.0 * PI / grid.period() * (n / 2) as f64;
    let rates: Vec<f64> = (0..n)
        .map(|i| {
            if i == null_a {
                0.0
            } else if i == null_b {
                xi_nyq.powi(4)
            } else {
                mu[i] * mu[i]
            }
        })
        .collect();

    Ok(BilaplacianEigensystem { q, rates })
}

/// Spectral differentiation matrix for even n on a period-L grid:
/// D_jk = (2π/L)·(1/2)(−1)^{j−k} cot(π(j−k)/n), zero diagonal. Antisymmetric.
pub(crate) fn differentiation_matrix(n: usize, period: f64) -> DMatrix<f64> {
    let scale = 2.0 * PI / period;
    DMatrix::from_fn(n, n, |j, k| {
        if j == k {
            0.0
        } else {
            let diff = j as isize - k as isize;
            let sign = if diff.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
            scale * 0.5 * sign / (PI * diff as f64 / n as f64).tan()
        }
    })
}
