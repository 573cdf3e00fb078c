//! Convergence of I_k(t) = t^{k/4} ∫ |∇_g^k b_g(x,·;t)| dV toward ν_k.

use rayon::prelude::*;

use bflab_spectral::SpectralField;

use crate::error::{KernelError, Result};
use crate::metric::MetricSpec;
use crate::nu::nu_constant;
use crate::reference::reference_kernel;
use crate::table::KernelTable;

/// Kernel rows are narrower than this many grid spacings → unresolvable.
const MIN_WIDTH_SPACINGS: f64 = 2.0;
/// Trigonometric upsampling target for the row integrals; |row| has kinks at
/// its zeros, so the L¹ sums need sub-grid resolution (error ∝ h²t^{-1/2}
/// per kink). Flat tables are translation-invariant, so a single row can be
/// pushed much finer.
const FINE_POINTS: usize = 32_768;
const FINE_POINTS_FLAT: usize = 262_144;

#[derive(Debug, Clone)]
pub struct RescalePoint {
    pub t: f64,
    pub i_k: f64,
    pub nu_k: f64,
    pub rel_gap: f64,
}

#[derive(Debug, Clone)]
pub struct RescaleReport {
    pub k: usize,
    pub points: Vec<RescalePoint>,
    pub truncated: bool,
    pub warning: Option<String>,
}

/// I_k(t) over a decreasing time sequence, from the matrix-exponential
/// reference kernel. Times below the grid's resolution are dropped with a
/// warning rather than reported as garbage.
pub fn rescaling_convergence(metric: &MetricSpec, k: usize, t_sequence: &[f64]) -> Result<RescaleReport> {
    if metric.dim() != 1 {
        return Err(KernelError::InvalidArgument("rescaling diagnostics are one-dimensional".into()));
    }
    if k > 3 {
        return Err(KernelError::InvalidArgument(format!(
            "covariant derivative order capped at 3, got {k}"
        )));
    }
    if t_sequence.is_empty() || t_sequence.windows(2).any(|w| w[1] >= w[0]) {
        return Err(KernelError::InvalidArgument(
            "t_sequence must be strictly decreasing toward 0".into(),
        ));
    }

    let grid = metric.grid();
    let t_min = (MIN_WIDTH_SPACINGS * grid.spacing()).powi(4);
    let usable: Vec<f64> = t_sequence.iter().copied().filter(|&t| t >= t_min).collect();
    let truncated = usable.len() < t_sequence.len();
    let warning = truncated.then(|| {
        format!(
            "dropped {} times below the resolution floor {t_min:.3e}",
            t_sequence.len() - usable.len()
        )
    });
    if usable.is_empty() {
        return Err(KernelError::ResolutionExceeded(format!(
            "every requested time sits below the resolution floor {t_min:.3e}"
        )));
    }

    let nu_k = nu_constant(1, k)?;
    let table = reference_kernel(metric, grid, &usable)?;
    let c = metric.coefficient_field();
    let target = if metric.is_flat() { FINE_POINTS_FLAT } else { FINE_POINTS };
    let factor = (target / grid.points_per_axis()).max(1).next_power_of_two();
    let c_fine = c.upsample(factor)?;

    let points: Result<Vec<RescalePoint>> = usable
        .iter()
        .enumerate()
        .map(|(t_idx, &t)| {
            let i_k = worst_row_integral(&table, &c, &c_fine, factor, k, t, t_idx, metric.is_flat())?;
            Ok(RescalePoint { t, i_k, nu_k, rel_gap: (i_k - nu_k).abs() / nu_k })
        })
        .collect();

    Ok(RescaleReport { k, points: points?, truncated, warning })
}

/// max over x of t^{k/4} ∫ |(c⁻¹∂_y)^k b(x,y;t)| c(y) dy, evaluated on the
/// trigonometric interpolant of each kernel row. On a flat metric every row
/// is a translate of row 0, so that single row stands in for the maximum.
#[allow(clippy::too_many_arguments)]
fn worst_row_integral(
    table: &KernelTable,
    c: &SpectralField,
    c_fine: &SpectralField,
    factor: usize,
    k: usize,
    t: f64,
    t_idx: usize,
    flat: bool,
) -> Result<f64> {
    let grid = table.grid();
    let n = grid.len();
    let fine_weight = grid.period() / (n * factor) as f64;
    let row_indices: Vec<usize> = if flat { vec![0] } else { (0..n).collect() };
    let rows: Result<Vec<f64>> = row_indices
        .into_par_iter()
        .map(|x_idx| {
            let mut field = SpectralField::from_samples(grid.clone(), table.row(x_idx, t_idx))?;
            for _ in 0..k {
                field = field.derivative(&[1])?.zip_with(c, |df, cv| df / cv)?;
            }
            let fine = field.upsample(factor)?;
            let integral: f64 = fine
                .samples()
                .iter()
                .zip(c_fine.samples())
                .map(|(&v, &cv)| v.abs() * cv)
                .sum::<f64>()
                * fine_weight;
            Ok(t.powf(k as f64 / 4.0) * integral)
        })
        .collect();
    Ok(rows?.into_iter().fold(0.0f64, f64::max))
}
