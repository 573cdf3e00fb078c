//! Thin deterministic wrapper around rustfft for real periodic fields.
//!
//! Convention: coefficients are the *normalized* DFT,
//!   c_k = (1/N_total) Σ_j f_j e^{-i ξ_k · x_j},
//! so synthesis is f_j = Σ_k c_k e^{+i ξ_k · x_j} and c_0 is the mean.

use std::cell::RefCell;

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::grid::Grid;

pub type C64 = Complex<f64>;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn fft_in_place(buf: &mut [C64], inverse: bool) {
    let n = buf.len();
    PLANNER.with(|p| {
        let fft = if inverse {
            p.borrow_mut().plan_fft_inverse(n)
        } else {
            p.borrow_mut().plan_fft_forward(n)
        };
        fft.process(buf);
    });
}

fn transpose(buf: &mut [C64], n: usize) {
    for i in 0..n {
        for j in (i + 1)..n {
            buf.swap(i * n + j, j * n + i);
        }
    }
}

fn fft_nd(grid: &Grid, buf: &mut [C64], inverse: bool) {
    let n = grid.points_per_axis();
    match grid.dim() {
        1 => fft_in_place(buf, inverse),
        _ => {
            for row in buf.chunks_mut(n) {
                fft_in_place(row, inverse);
            }
            transpose(buf, n);
            for row in buf.chunks_mut(n) {
                fft_in_place(row, inverse);
            }
            transpose(buf, n);
        }
    }
}

/// Forward transform of real samples; returns normalized coefficients with
/// conjugate symmetry enforced exactly.
pub fn analyze(grid: &Grid, samples: &[f64]) -> Vec<C64> {
    debug_assert_eq!(samples.len(), grid.len());
    let mut buf: Vec<C64> = samples.iter().map(|&s| C64::new(s, 0.0)).collect();
    fft_nd(grid, &mut buf, false);
    let scale = 1.0 / grid.len() as f64;
    for c in &mut buf {
        *c *= scale;
    }
    enforce_conjugate_symmetry(grid, &mut buf);
    buf
}

/// Inverse transform to real samples. Returns the largest imaginary residue
/// seen, which callers treat as an internal consistency signal.
pub fn synthesize(grid: &Grid, coeffs: &[C64]) -> (Vec<f64>, f64) {
    debug_assert_eq!(coeffs.len(), grid.len());
    let mut buf = coeffs.to_vec();
    fft_nd(grid, &mut buf, true);
    let mut imag_max = 0.0f64;
    let samples = buf
        .iter()
        .map(|c| {
            imag_max = imag_max.max(c.im.abs());
            c.re
        })
        .collect();
    (samples, imag_max)
}

/// Index of the mirrored mode -k on one axis.
fn mirror(n: usize, k: usize) -> usize {
    if k == 0 {
        0
    } else {
        n - k
    }
}

/// Make coefficients exactly Hermitian (the real-field constraint):
/// c_{-k} = conj(c_k), with the self-conjugate modes forced real.
pub fn enforce_conjugate_symmetry(grid: &Grid, coeffs: &mut [C64]) {
    let n = grid.points_per_axis();
    match grid.dim() {
        1 => {
            for k in 0..=n / 2 {
                let m = mirror(n, k);
                if m == k {
                    coeffs[k] = C64::new(coeffs[k].re, 0.0);
                } else {
                    let avg = 0.5 * (coeffs[k] + coeffs[m].conj());
                    coeffs[k] = avg;
                    coeffs[m] = avg.conj();
                }
            }
        }
        _ => {
            for kx in 0..n {
                for ky in 0..n {
                    let (mx, my) = (mirror(n, kx), mirror(n, ky));
                    let idx = kx * n + ky;
                    let mid = mx * n + my;
                    if mid == idx {
                        coeffs[idx] = C64::new(coeffs[idx].re, 0.0);
                    } else if mid > idx {
                        let avg = 0.5 * (coeffs[idx] + coeffs[mid].conj());
                        coeffs[idx] = avg;
                        coeffs[mid] = avg.conj();
                    }
                }
            }
        }
    }
}

/// Largest deviation from conjugate symmetry, used as a drift check after
/// nonlinear operations.
pub fn conjugate_symmetry_defect(grid: &Grid, coeffs: &[C64]) -> f64 {
    let n = grid.points_per_axis();
    let mut worst = 0.0f64;
    match grid.dim() {
        1 => {
            for k in 0..n {
                let m = mirror(n, k);
                worst = worst.max((coeffs[k] - coeffs[m].conj()).norm());
            }
        }
        _ => {
            for kx in 0..n {
                for ky in 0..n {
                    let idx = kx * n + ky;
                    let mid = mirror(n, kx) * n + mirror(n, ky);
                    worst = worst.max((coeffs[idx] - coeffs[mid].conj()).norm());
                }
            }
        }
    }
    worst
}
