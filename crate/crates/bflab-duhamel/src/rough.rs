//! Band-limited rough initial data for the smoothing experiments.
//!
//! Any field on the grid is a trigonometric polynomial, so "rough" here
//! means the coefficient envelope: each generator truncates a classical
//! series at a third of the axis resolution (leaving headroom for products
//! downstream) and is classified by where its *second* derivative would sit
//! in the continuum limit. That is the quantity the smoothing theory
//! weighs, so the three classes below are the three regimes the
//! experiments probe — bounded-but-discontinuous, continuous-but-fractal,
//! and Lipschitz.

use std::f64::consts::PI;

use bflab_spectral::{Grid, SpectralField};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{DuhamelError, Result};

/// Highest retained wavenumber: a third of the axis resolution.
pub fn band_limit(grid: &Grid) -> usize {
    grid.points_per_axis() / 3
}

fn require_one_dimensional(grid: &Grid, what: &str) -> Result<()> {
    if grid.dim() != 1 {
        return Err(DuhamelError::InvalidArgument(format!(
            "{what} data is generated on one-dimensional grids"
        )));
    }
    Ok(())
}

/// u₀ whose second derivative is a truncated square wave: bounded with jump
/// discontinuities, the L^∞ \ C⁰ end of the smoothing scale.
pub fn sawtooth_data(grid: &Grid) -> Result<SpectralField> {
    require_one_dimensional(grid, "sawtooth")?;
    let band = band_limit(grid);
    Ok(SpectralField::from_fn(grid.clone(), move |x, _| {
        let mut acc = 0.0;
        let mut k = 1usize;
        while k <= band {
            let kf = k as f64;
            acc += 4.0 / PI * kf.powi(-3) * (kf * x).sin();
            k += 2;
        }
        acc
    }))
}

/// u₀ whose second derivative is a truncated triangle wave: Lipschitz, so
/// continuous with the cleanest modulus — the control case for vanishing
/// weighted norms.
pub fn triangle_data(grid: &Grid) -> Result<SpectralField> {
    require_one_dimensional(grid, "triangle")?;
    let band = band_limit(grid);
    Ok(SpectralField::from_fn(grid.clone(), move |x, _| {
        let mut acc = 0.0;
        let mut k = 1usize;
        let mut sign = 1.0;
        while k <= band {
            let kf = k as f64;
            acc += sign * 8.0 / (PI * PI) * kf.powi(-4) * (kf * x).sin();
            sign = -sign;
            k += 2;
        }
        acc
    }))
}

/// u₀ whose second derivative is a truncated Weierstrass series
/// Σ a^j cos(b^j x) with a = 1/2, b = 3: continuous but with a fractal
/// modulus of continuity.
pub fn weierstrass_data(grid: &Grid) -> Result<SpectralField> {
    require_one_dimensional(grid, "Weierstrass")?;
    let band = band_limit(grid);
    let (a, b) = (0.5f64, 3usize);
    let mut scales = Vec::new();
    let mut wavenumber = 1usize;
    let mut amplitude = 1.0f64;
    while wavenumber <= band {
        scales.push((wavenumber as f64, amplitude));
        wavenumber *= b;
        amplitude *= a;
    }
    Ok(SpectralField::from_fn(grid.clone(), move |x, _| {
        scales.iter().map(|&(k, amp)| -amp / (k * k) * (k * x).cos()).sum()
    }))
}

/// Seeded random u₀ in the C^{1,1} class: coefficient envelope k^{−3} with
/// random amplitudes and phases, so the second derivative's envelope is
/// k^{−1} — bounded, at the edge of continuity.
pub fn random_c11_data(grid: &Grid, seed: u64) -> Result<SpectralField> {
    require_one_dimensional(grid, "random C^{1,1}")?;
    let band = band_limit(grid);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let modes: Vec<(f64, f64, f64)> = (1..=band)
        .map(|k| {
            let amplitude = (k as f64).powi(-3) * rng.gen_range(0.5..1.0);
            let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
            let phase = rng.gen_range(0.0..2.0 * PI);
            (k as f64, sign * amplitude, phase)
        })
        .collect();
    Ok(SpectralField::from_fn(grid.clone(), move |x, _| {
        modes.iter().map(|&(k, amp, phase)| amp * (k * x + phase).sin()).sum()
    }))
}
