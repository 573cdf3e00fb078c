//! The perturbed bilaplacian in expanded coefficient form.
//!
//! On the conformal interval g = c(x)²dx² the Laplace–Beltrami operator is
//! Δ_g u = α u″ + β u′ with α = c⁻² and β = −c⁻³c′. Composing it with itself
//! and collecting derivatives of u gives
//!
//!   Δ_g² u = a u⁗ + A₃ u‴ + A₂ u″ + A₁ u′,
//!   a  = α²,
//!   A₃ = 2αα′ + 2αβ,
//!   A₂ = αα″ + 2αβ′ + α′β + β²,
//!   A₁ = αβ″ + ββ′.
//!
//! The defect expansion needs these coefficients pointwise (the leading one
//! is exactly the frozen coefficient a = c⁻⁴), and kernel validation needs
//! the operator applied along the x-argument of a table slice. Coefficient
//! derivatives are spectral: the conformal factor is smooth and periodic, so
//! they are exact to rounding at production resolutions.

use nalgebra::DMatrix;

use bflab_kernel::MetricSpec;
use bflab_spectral::{Grid, SpectralField};

use crate::error::Result;

#[derive(Clone, Debug)]
pub(crate) struct OperatorCoefficients {
    grid: Grid,
    a: Vec<f64>,
    a3: Vec<f64>,
    a2: Vec<f64>,
    a1: Vec<f64>,
}

impl OperatorCoefficients {
    pub fn new(metric: &MetricSpec) -> Result<Self> {
        let c = metric.coefficient_field();
        let grid = c.grid().clone();
        let alpha = c.map(|v| v.powi(-2));
        let c1 = c.derivative(&[1])?;
        let beta = c.zip_with(&c1, |cv, dv| -dv / cv.powi(3))?;

        let alpha1 = alpha.derivative(&[1])?;
        let alpha2 = alpha.derivative(&[2])?;
        let beta1 = beta.derivative(&[1])?;
        let beta2 = beta.derivative(&[2])?;

        let n = grid.len();
        let mut a = vec![0.0; n];
        let mut a3 = vec![0.0; n];
        let mut a2 = vec![0.0; n];
        let mut a1 = vec![0.0; n];
        for i in 0..n {
            let al = alpha.value(i);
            let be = beta.value(i);
            a[i] = al * al;
            a3[i] = 2.0 * al * alpha1.value(i) + 2.0 * al * be;
            a2[i] = al * alpha2.value(i)
                + 2.0 * al * beta1.value(i)
                + alpha1.value(i) * be
                + be * be;
            a1[i] = al * beta2.value(i) + be * beta1.value(i);
        }
        Ok(OperatorCoefficients { grid, a, a3, a2, a1 })
    }

    /// Leading coefficient a(x) = c(x)⁻⁴ — the frozen symbol's coefficient.
    pub fn leading(&self) -> &[f64] {
        &self.a
    }

    pub fn third(&self) -> &[f64] {
        &self.a3
    }

    pub fn second(&self) -> &[f64] {
        &self.a2
    }

    pub fn first(&self) -> &[f64] {
        &self.a1
    }

    pub fn apply(&self, u: &SpectralField) -> Result<SpectralField> {
        let d1 = u.derivative(&[1])?;
        let d2 = u.derivative(&[2])?;
        let d3 = u.derivative(&[3])?;
        let d4 = u.derivative(&[4])?;
        let samples = (0..self.grid.len())
            .map(|i| {
                self.a[i] * d4.value(i)
                    + self.a3[i] * d3.value(i)
                    + self.a2[i] * d2.value(i)
                    + self.a1[i] * d1.value(i)
            })
            .collect();
        Ok(SpectralField::from_samples(self.grid.clone(), samples)?)
    }

    /// Δ_g² applied in the first (x) argument of a kernel slice: every
    /// column b(·, y) is a function on the grid.
    pub fn apply_columns(&self, m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        let n = self.grid.len();
        let mut out = DMatrix::zeros(n, n);
        for j in 0..n {
            let column = SpectralField::from_samples(self.grid.clone(), m.column(j).iter().copied().collect())?;
            let applied = self.apply(&column)?;
            for i in 0..n {
                out[(i, j)] = applied.value(i);
            }
        }
        Ok(out)
    }
}

/// Spectral x-derivative of a kernel slice (along the first index).
pub(crate) fn derivative_columns(grid: &Grid, m: &DMatrix<f64>, order: usize) -> Result<DMatrix<f64>> {
    let n = grid.len();
    let mut out = DMatrix::zeros(n, n);
    for j in 0..n {
        let column = SpectralField::from_samples(grid.clone(), m.column(j).iter().copied().collect())?;
        let d = column.derivative(&[order])?;
        for i in 0..n {
            out[(i, j)] = d.value(i);
        }
    }
    Ok(out)
}

/// Spectral y-derivative of a kernel slice (along the second index).
pub(crate) fn derivative_rows(grid: &Grid, m: &DMatrix<f64>, order: usize) -> Result<DMatrix<f64>> {
    let n = grid.len();
    let mut out = DMatrix::zeros(n, n);
    for i in 0..n {
        let row = SpectralField::from_samples(grid.clone(), m.row(i).iter().copied().collect())?;
        let d = row.derivative(&[order])?;
        for j in 0..n {
            out[(i, j)] = d.value(j);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::OperatorCoefficients;
    use bflab_kernel::MetricSpec;
    use bflab_spectral::{Grid, SpectralField};

    fn perturbed() -> MetricSpec {
        let grid = Grid::standard(1, 128).unwrap();
        let profile = SpectralField::from_fn(grid, |x, _| x.cos() + 0.5 * (2.0 * x).sin());
        MetricSpec::conformal(profile, 0.1).unwrap()
    }

    #[test]
    fn expanded_coefficients_reproduce_the_composed_operator() {
        let metric = perturbed();
        let coeffs = OperatorCoefficients::new(&metric).unwrap();
        let grid = metric.grid().clone();
        let c = metric.coefficient_field();

        let u = SpectralField::from_fn(grid, |x, _| (3.0 * x).sin() + 0.3 * (x.cos()).powi(2));
        // Independent route: apply Δ_g = αd² + βd′ twice.
        let laplace = |f: &SpectralField| {
            let d1 = f.derivative(&[1]).unwrap();
            let d2 = f.derivative(&[2]).unwrap();
            let c1 = c.derivative(&[1]).unwrap();
            let samples = (0..f.grid().len())
                .map(|i| {
                    let cv = c.value(i);
                    d2.value(i) / (cv * cv) - c1.value(i) * d1.value(i) / cv.powi(3)
                })
                .collect();
            SpectralField::from_samples(f.grid().clone(), samples).unwrap()
        };
        let composed = laplace(&laplace(&u));
        let expanded = coeffs.apply(&u).unwrap();
        let scale = composed.sup_norm();
        for i in 0..composed.grid().len() {
            assert!(
                (composed.value(i) - expanded.value(i)).abs() < 1e-9 * scale,
                "node {i}"
            );
        }
    }

    #[test]
    fn flat_metric_reduces_to_the_plain_bilaplacian() {
        let grid = Grid::standard(1, 64).unwrap();
        let coeffs = OperatorCoefficients::new(&MetricSpec::flat(grid.clone())).unwrap();
        assert!(coeffs.leading().iter().all(|&v| (v - 1.0).abs() < 1e-14));
        assert!(coeffs.third().iter().all(|&v| v.abs() < 1e-12));
        assert!(coeffs.second().iter().all(|&v| v.abs() < 1e-12));
        assert!(coeffs.first().iter().all(|&v| v.abs() < 1e-12));
        let u = SpectralField::from_fn(grid, |x, _| (2.0 * x).cos());
        let applied = coeffs.apply(&u).unwrap();
        let plain = u.bilaplacian();
        for i in 0..u.grid().len() {
            assert!((applied.value(i) - plain.value(i)).abs() < 1e-10);
        }
    }
}
