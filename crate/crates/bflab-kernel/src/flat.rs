//! Flat-torus kernel by truncated Fourier series.

use rayon::prelude::*;

use bflab_spectral::{Grid, SpectralField, C64};

use crate::error::{KernelError, Result};
use crate::table::{Construction, KernelTable, Operator};

/// Largest admissible size of the first dropped series term e^{−ξ_Nyq⁴ t}.
const TAIL_BOUND: f64 = 1e-12;

/// b(x,y;t) = (1/Vol) Σ_ξ e^{−|ξ|⁴t} e^{iξ·(x−y)} on the grid's mode band.
/// Refuses times whose series tail exceeds the truncation bound.
pub fn flat_torus_kernel(grid: &Grid, times: &[f64]) -> Result<KernelTable> {
    let xi_nyq = grid.wavenumber(grid.points_per_axis() / 2).abs();
    for &t in times {
        if !(t > 0.0) {
            return Err(KernelError::InvalidArgument(format!("times must be positive, got {t}")));
        }
        let tail = (-xi_nyq.powi(4) * t).exp();
        if tail > TAIL_BOUND {
            let needed = ((-TAIL_BOUND.ln() / t).powf(0.25) * grid.period()
                / (2.0 * std::f64::consts::PI))
                * 2.0;
            return Err(KernelError::ResolutionExceeded(format!(
                "t = {t:.3e} leaves a series tail {tail:.3e} > {TAIL_BOUND:.0e}; \
                 needs points_per_axis ≥ {} (have {})",
                (needed.ceil() as usize).next_power_of_two(),
                grid.points_per_axis()
            )));
        }
    }

    let rows: Result<Vec<Vec<f64>>> = times
        .par_iter()
        .map(|&t| displacement_row(grid, t).map(|f| f.samples().to_vec()))
        .collect();
    KernelTable::from_translation_rows(
        grid.clone(),
        times.to_vec(),
        rows?,
        Operator::Flat,
        Construction::Spectral,
    )
}

/// The kernel as a function of the displacement d = y − x.
pub fn displacement_row(grid: &Grid, t: f64) -> Result<SpectralField> {
    let vol = grid.volume();
    let n = grid.points_per_axis();
    let mut coeffs = vec![C64::new(0.0, 0.0); grid.len()];
    match grid.dim() {
        1 => {
            for (k, c) in coeffs.iter_mut().enumerate() {
                let xi = grid.wavenumber(k);
                *c = C64::new((-xi.powi(4) * t).exp() / vol, 0.0);
            }
        }
        _ => {
            for kx in 0..n {
                let xx = grid.wavenumber(kx);
                for ky in 0..n {
                    let xy = grid.wavenumber(ky);
                    let q = xx * xx + xy * xy;
                    coeffs[kx * n + ky] = C64::new((-q * q * t).exp() / vol, 0.0);
                }
            }
        }
    }
    Ok(SpectralField::from_coeffs(grid.clone(), coeffs)?)
}
