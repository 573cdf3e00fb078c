use crate::error::{Result, SpectralError};
use crate::fft::{self, C64};
use crate::grid::Grid;

/// Drift beyond this in the real/Fourier round trip or in conjugate symmetry
/// is treated as an internal error rather than a numerical tolerance.
const SYMMETRY_DRIFT_LIMIT: f64 = 1e-10;

/// A real scalar field on a periodic grid, stored as node samples together
/// with its (always synchronized) Fourier coefficients.
#[derive(Debug, Clone)]
pub struct SpectralField {
    grid: Grid,
    samples: Vec<f64>,
    coeffs: Vec<C64>,
}

impl SpectralField {
    pub fn from_samples(grid: Grid, samples: Vec<f64>) -> Result<Self> {
        if samples.len() != grid.len() {
            return Err(SpectralError::InvalidArgument(format!(
                "expected {} samples, got {}",
                grid.len(),
                samples.len()
            )));
        }
        let coeffs = fft::analyze(&grid, &samples);
        Ok(SpectralField { grid, samples, coeffs })
    }

    pub fn from_coeffs(grid: Grid, mut coeffs: Vec<C64>) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return Err(SpectralError::InvalidArgument(format!(
                "expected {} coefficients, got {}",
                grid.len(),
                coeffs.len()
            )));
        }
        let defect = fft::conjugate_symmetry_defect(&grid, &coeffs);
        let scale = coeffs.iter().map(|c| c.norm()).fold(0.0f64, f64::max);
        if defect > SYMMETRY_DRIFT_LIMIT * scale.max(1.0) {
            return Err(SpectralError::Internal(format!(
                "conjugate symmetry drift {defect:.3e} exceeds limit (scale {scale:.3e})"
            )));
        }
        fft::enforce_conjugate_symmetry(&grid, &mut coeffs);
        let (samples, _imag) = fft::synthesize(&grid, &coeffs);
        Ok(SpectralField { grid, samples, coeffs })
    }

    pub fn from_fn(grid: Grid, f: impl Fn(f64, f64) -> f64) -> Self {
        let samples = (0..grid.len())
            .map(|idx| {
                let [x, y] = grid.node(idx);
                f(x, y)
            })
            .collect();
        SpectralField::from_samples(grid, samples).expect("sample count matches grid")
    }

    pub fn zeros(grid: Grid) -> Self {
        let n = grid.len();
        SpectralField {
            grid,
            samples: vec![0.0; n],
            coeffs: vec![C64::new(0.0, 0.0); n],
        }
    }

    pub fn constant(grid: Grid, value: f64) -> Self {
        let n = grid.len();
        let mut coeffs = vec![C64::new(0.0, 0.0); n];
        coeffs[0] = C64::new(value, 0.0);
        SpectralField { grid, samples: vec![value; n], coeffs }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn value(&self, idx: usize) -> f64 {
        self.samples[idx]
    }

    /// Spatial derivative ∂^order, one order entry per axis; exact for
    /// band-limited fields. Odd orders zero the Nyquist mode on their axis.
    pub fn derivative(&self, order: &[usize]) -> Result<SpectralField> {
        if order.len() != self.grid.dim() {
            return Err(SpectralError::InvalidArgument(format!(
                "derivative order has {} components for a {}-D grid",
                order.len(),
                self.grid.dim()
            )));
        }
        let n = self.grid.points_per_axis();
        let axis_factor = |o: usize, k: usize| -> C64 {
            if o == 0 {
                return C64::new(1.0, 0.0);
            }
            if k == n / 2 && o % 2 == 1 {
                return C64::new(0.0, 0.0);
            }
            let xi = self.grid.wavenumber(k);
            C64::new(0.0, xi).powu(o as u32)
        };
        let mut coeffs = self.coeffs.clone();
        match self.grid.dim() {
            1 => {
                for (k, c) in coeffs.iter_mut().enumerate() {
                    *c *= axis_factor(order[0], k);
                }
            }
            _ => {
                for kx in 0..n {
                    let fx = axis_factor(order[0], kx);
                    for ky in 0..n {
                        coeffs[kx * n + ky] *= fx * axis_factor(order[1], ky);
                    }
                }
            }
        }
        SpectralField::from_coeffs(self.grid.clone(), coeffs)
    }

    /// Multiply coefficients by a real symbol m(ξ); preserves realness when
    /// the symbol is even in ξ, which holds for every symbol used here
    /// (functions of |ξ|²).
    pub fn apply_symbol(&self, symbol: impl Fn(f64, f64) -> f64) -> SpectralField {
        let n = self.grid.points_per_axis();
        let mut coeffs = self.coeffs.clone();
        match self.grid.dim() {
            1 => {
                for (k, c) in coeffs.iter_mut().enumerate() {
                    *c *= symbol(self.grid.wavenumber(k), 0.0);
                }
            }
            _ => {
                for kx in 0..n {
                    let xix = self.grid.wavenumber(kx);
                    for ky in 0..n {
                        coeffs[kx * n + ky] *= symbol(xix, self.grid.wavenumber(ky));
                    }
                }
            }
        }
        SpectralField::from_coeffs(self.grid.clone(), coeffs)
            .expect("real even symbol preserves conjugate symmetry")
    }

    /// Δ (flat Laplacian over the grid's axes).
    pub fn laplacian(&self) -> SpectralField {
        self.apply_symbol(|xx, xy| -(xx * xx + xy * xy))
    }

    /// Δ² (flat bilaplacian).
    pub fn bilaplacian(&self) -> SpectralField {
        self.apply_symbol(|xx, xy| {
            let q = xx * xx + xy * xy;
            q * q
        })
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> SpectralField {
        let samples = self.samples.iter().map(|&s| f(s)).collect();
        SpectralField::from_samples(self.grid.clone(), samples).expect("same grid")
    }

    pub fn zip_with(&self, other: &SpectralField, f: impl Fn(f64, f64) -> f64) -> Result<SpectralField> {
        self.check_same_grid(other)?;
        let samples = self
            .samples
            .iter()
            .zip(&other.samples)
            .map(|(&a, &b)| f(a, b))
            .collect();
        SpectralField::from_samples(self.grid.clone(), samples)
    }

    pub fn add(&self, other: &SpectralField) -> Result<SpectralField> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &SpectralField) -> Result<SpectralField> {
        self.zip_with(other, |a, b| a - b)
    }

    /// Plain pointwise product (no dealiasing).
    pub fn mul(&self, other: &SpectralField) -> Result<SpectralField> {
        self.zip_with(other, |a, b| a * b)
    }

    pub fn scale(&self, factor: f64) -> SpectralField {
        self.map(|s| s * factor)
    }

    pub fn add_scalar(&self, value: f64) -> SpectralField {
        self.map(|s| s + value)
    }

    /// Pointwise product with the 2/3-rule truncation applied to both inputs
    /// and to the output, suppressing quadratic aliasing.
    pub fn dealiased_product(&self, other: &SpectralField) -> Result<SpectralField> {
        self.check_same_grid(other)?;
        let a = self.truncate_two_thirds();
        let b = other.truncate_two_thirds();
        let prod = a.mul(&b)?;
        Ok(prod.truncate_two_thirds())
    }

    /// Zero all modes with |k| > n/3 on any axis.
    pub fn truncate_two_thirds(&self) -> SpectralField {
        let n = self.grid.points_per_axis();
        let cut = (n / 3) as i64;
        let keep = |k: i64| k.abs() <= cut;
        let mut coeffs = self.coeffs.clone();
        match self.grid.dim() {
            1 => {
                for (k, c) in coeffs.iter_mut().enumerate() {
                    if !keep(self.grid.signed_index(k)) {
                        *c = C64::new(0.0, 0.0);
                    }
                }
            }
            _ => {
                for kx in 0..n {
                    for ky in 0..n {
                        if !keep(self.grid.signed_index(kx)) || !keep(self.grid.signed_index(ky)) {
                            coeffs[kx * n + ky] = C64::new(0.0, 0.0);
                        }
                    }
                }
            }
        }
        SpectralField::from_coeffs(self.grid.clone(), coeffs).expect("truncation keeps symmetry")
    }

    /// Zero-padded trigonometric interpolation onto a grid `factor` times
    /// finer. The Nyquist coefficient is split evenly between ±n/2, which
    /// reproduces the real cosine interpolant; exact for band-limited fields.
    pub fn upsample(&self, factor: usize) -> Result<SpectralField> {
        if factor == 0 || !factor.is_power_of_two() {
            return Err(SpectralError::InvalidArgument(format!(
                "upsample factor must be a power of two, got {factor}"
            )));
        }
        if factor == 1 {
            return Ok(self.clone());
        }
        let n = self.grid.points_per_axis();
        let fine_n = n * factor;
        let fine = Grid::new(self.grid.dim(), fine_n, self.grid.period())?;
        let targets = |k: usize| -> Vec<(usize, f64)> {
            let s = self.grid.signed_index(k);
            if s == (n / 2) as i64 {
                vec![(n / 2, 0.5), (fine_n - n / 2, 0.5)]
            } else if s >= 0 {
                vec![(s as usize, 1.0)]
            } else {
                vec![(fine_n - s.unsigned_abs() as usize, 1.0)]
            }
        };
        let mut coeffs = vec![C64::new(0.0, 0.0); fine.len()];
        match self.grid.dim() {
            1 => {
                for k in 0..n {
                    for &(fk, w) in &targets(k) {
                        coeffs[fk] += self.coeffs[k] * w;
                    }
                }
            }
            _ => {
                for kx in 0..n {
                    let tx = targets(kx);
                    for ky in 0..n {
                        let c = self.coeffs[kx * n + ky];
                        for &(fx, wx) in &tx {
                            for &(fy, wy) in &targets(ky) {
                                coeffs[fx * fine_n + fy] += c * (wx * wy);
                            }
                        }
                    }
                }
            }
        }
        SpectralField::from_coeffs(fine, coeffs)
    }

    pub fn sup_norm(&self) -> f64 {
        self.samples.iter().fold(0.0f64, |m, &s| m.max(s.abs()))
    }

    pub fn min(&self) -> f64 {
        self.samples.iter().fold(f64::INFINITY, |m, &s| m.min(s))
    }

    pub fn max(&self) -> f64 {
        self.samples.iter().fold(f64::NEG_INFINITY, |m, &s| m.max(s))
    }

    /// Trapezoid integral over the torus with the flat measure.
    pub fn integral(&self) -> f64 {
        self.samples.iter().sum::<f64>() * self.grid.node_weight()
    }

    /// Trapezoid integral of |f|.
    pub fn l1_norm(&self) -> f64 {
        self.samples.iter().map(|s| s.abs()).sum::<f64>() * self.grid.node_weight()
    }

    pub fn mean(&self) -> f64 {
        self.coeffs[0].re
    }

    /// Same field with the mean removed (the gauge used for potentials).
    pub fn mean_zeroed(&self) -> SpectralField {
        let m = self.mean();
        self.map(|s| s - m)
    }

    pub fn check_same_grid(&self, other: &SpectralField) -> Result<()> {
        if self.grid != other.grid {
            return Err(SpectralError::GridMismatch(format!(
                "{}D n={} vs {}D n={}",
                self.grid.dim(),
                self.grid.points_per_axis(),
                other.grid.dim(),
                other.grid.points_per_axis()
            )));
        }
        Ok(())
    }
}
