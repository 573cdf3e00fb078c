//! Envelope fitting: log|b| against (t^{-1/4}ρ)^p over the profile tail.

use crate::error::{KernelError, Result};
use crate::profile::KernelProfile;

/// Fit window opens at this rescaled radius. The tail ansatz ignores the
/// algebraic prefactor of the true asymptotics, and that prefactor tilts the
/// fitted exponent unless the window starts well clear of the central lobe.
const WINDOW_START: f64 = 4.0;
/// The profile must reach at least this rescaled radius to expose the tail.
const WINDOW_REQUIRED: f64 = 6.0;
/// Values this far below the profile peak are treated as quadrature noise.
const VALUE_FLOOR_REL: f64 = 1e-10;
/// Oscillating kernels are fitted through the envelope touch points; fall
/// back to every window point when the profile is monotone (Gaussian case).
const MIN_PEAKS: usize = 6;

#[derive(Debug, Clone)]
pub struct DecayFit {
    pub c_est: f64,
    pub delta_est: f64,
    pub exponent_est: f64,
    pub points_used: usize,
    pub used_peaks_only: bool,
}

/// Least-squares fit of log|values| = log C − δ·(t^{-1/4}ρ)^p with p free.
pub fn decay_fit(profile: &KernelProfile) -> Result<DecayFit> {
    let t_quarter = profile.t().powf(0.25);
    let rescaled: Vec<f64> = profile.radii().iter().map(|r| r / t_quarter).collect();
    if rescaled.last().copied().unwrap_or(0.0) < WINDOW_REQUIRED {
        return Err(KernelError::InvalidArgument(format!(
            "profile must cover rescaled radii ≥ {WINDOW_REQUIRED}; has {:.3}",
            rescaled.last().copied().unwrap_or(0.0)
        )));
    }
    let peak_value = profile.values().iter().fold(0.0f64, |m, &v| m.max(v.abs()));
    let floor = VALUE_FLOOR_REL * peak_value;

    let abs: Vec<f64> = profile.values().iter().map(|v| v.abs()).collect();
    let in_window =
        |i: usize| rescaled[i] >= WINDOW_START && abs[i] > floor && abs[i].is_finite();

    // Envelope touch points: strict local maxima of |values| inside the window.
    let mut picked: Vec<usize> = (1..abs.len() - 1)
        .filter(|&i| in_window(i) && abs[i] > abs[i - 1] && abs[i] > abs[i + 1])
        .collect();
    let used_peaks_only = picked.len() >= MIN_PEAKS;
    if !used_peaks_only {
        picked = (0..abs.len()).filter(|&i| in_window(i)).collect();
    }
    if picked.len() < 3 {
        return Err(KernelError::FitWindow(format!(
            "only {} usable tail points above the value floor",
            picked.len()
        )));
    }

    let xs: Vec<f64> = picked.iter().map(|&i| rescaled[i]).collect();
    let ys: Vec<f64> = picked.iter().map(|&i| abs[i].ln()).collect();

    // Exponent by grid search with a parabolic refinement of the SSE minimum.
    let grid: Vec<f64> = (50..=320).map(|i| i as f64 * 0.01).collect();
    let sse: Vec<f64> = grid.iter().map(|&p| regression_sse(&xs, &ys, p).2).collect();
    let best = sse
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .map(|(i, _)| i)
        .unwrap();
    let exponent = if best == 0 || best == grid.len() - 1 {
        grid[best]
    } else {
        parabolic_vertex(
            grid[best - 1],
            sse[best - 1],
            grid[best],
            sse[best],
            grid[best + 1],
            sse[best + 1],
        )
    };
    let (intercept, slope, _) = regression_sse(&xs, &ys, exponent);

    Ok(DecayFit {
        c_est: intercept.exp(),
        delta_est: -slope,
        exponent_est: exponent,
        points_used: picked.len(),
        used_peaks_only,
    })
}

/// Control profile: the Gaussian heat kernel (4πt)^{-dim/2} e^{−r²/4t}.
pub fn gaussian_control_profile(dim: usize, t: f64, radii: &[f64]) -> Result<KernelProfile> {
    let amp = (4.0 * std::f64::consts::PI * t).powf(-(dim as f64) / 2.0);
    let values: Vec<f64> = radii.iter().map(|&r| amp * (-r * r / (4.0 * t)).exp()).collect();
    KernelProfile::new(dim, 0, t, radii.to_vec(), values)
}

/// Linear regression of y on x^p: returns (intercept, slope, SSE).
fn regression_sse(xs: &[f64], ys: &[f64], p: f64) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let tx: Vec<f64> = xs.iter().map(|&x| x.powf(p)).collect();
    let sx: f64 = tx.iter().sum();
    let sy: f64 = ys.iter().sum();
    let sxx: f64 = tx.iter().map(|&x| x * x).sum();
    let sxy: f64 = tx.iter().zip(ys).map(|(&x, &y)| x * y).sum();
    let denom = n * sxx - sx * sx;
    let slope = (n * sxy - sx * sy) / denom;
    let intercept = (sy - slope * sx) / n;
    let sse = tx
        .iter()
        .zip(ys)
        .map(|(&x, &y)| {
            let e = y - intercept - slope * x;
            e * e
        })
        .sum();
    (intercept, slope, sse)
}

fn parabolic_vertex(x0: f64, y0: f64, x1: f64, y1: f64, x2: f64, y2: f64) -> f64 {
    let d1 = (y1 - y0) / (x1 - x0);
    let d2 = (y2 - y1) / (x2 - x1);
    let curvature = (d2 - d1) / (x2 - x0);
    if curvature.abs() < 1e-300 {
        return x1;
    }
    0.5 * (x0 + x1) - d1 / (2.0 * curvature)
}
