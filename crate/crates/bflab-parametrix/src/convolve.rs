//! Space–time convolution (A∗B)(x,y;t) = ∫₀ᵗ∫ A(x,ξ;t−s)B(ξ,y;s) dV(ξ) ds.
//!
//! The time integral splits at s = t/2 and each half is graded with the
//! substitution s = t·σ⁴ (resp. t−s = t·υ⁴), which absorbs the integrable
//! t^{−3/4}-type endpoint singularities into a smooth integrand; Gauss
//! panels in σ then converge fast. At a fixed quadrature node the spatial
//! integral is a single weighted matrix product.
//!
//! Each factor carries a *floor*: the larger of its first stored time and
//! the spatial resolution limit 4h⁴ below which a kernel of width s^{1/4}
//! aliases on the grid. Quadrature nodes never go below a factor's floor.
//! The leftover slivers [0, floor] are closed analytically: there the inner
//! factor is a near-delta spike, and what the outer factor feels of it is a
//! handful of moments, so the sliver contributes
//!
//!   Σ_{k≤4} ∂₂ᵏA(x,y;t−c/2)·mₖ(y)·c/k!
//!
//! with mₖ the k-th column moments of B sampled at its floor (mirrored with
//! row moments of A at the top end). The truncation order matches the
//! operator: a defect column's signed moments settle to s-independent O(ε)
//! values precisely up to order 4 and vanish beyond it, so moments 0..=4 are
//! exactly the ones that survive the s → 0 limit. Crucially the closure is
//! *linear* in both factors, so convolution stays exactly bilinear and the
//! Neumann partial sums satisfy their integral-equation identity to rounding
//! rather than to model error.

use nalgebra::DMatrix;
use rayon::prelude::*;

use bflab_kernel::gl16_points;
use bflab_spectral::Grid;

use crate::error::{ParametrixError, Result};
use crate::operator::{derivative_columns, derivative_rows};

/// Gauss panels per σ-half; doubled for the built-in refinement check.
pub(crate) const PANELS: usize = 6;

const DIM: f64 = 1.0;

/// Smallest time at which a kernel of width t^{1/4} is resolved by the grid.
pub fn resolution_floor(grid: &Grid) -> f64 {
    4.0 * grid.spacing().powi(4)
}

/// A kernel-like object defined on a grid and a time range: dense slices on
/// stored times plus an evaluation rule in between (interpolation for plain
/// tables, exact re-evaluation for profile-backed ones).
pub trait TimeKernel: Sync {
    fn grid(&self) -> &Grid;
    fn times(&self) -> &[f64];
    /// Volume element dV at each node.
    fn weights(&self) -> &[f64];
    /// Nominal power q in values ~ t^{−q}; normalizes log-time interpolation.
    fn power(&self) -> f64;
    /// Smallest time at which slices are trustworthy.
    fn floor(&self) -> f64;
    fn slice_at(&self, t: f64) -> Result<DMatrix<f64>>;
    fn stored_sup_norms(&self) -> &[f64];
}

/// Dense per-time kernel slices with power-normalized log-time interpolation.
#[derive(Clone, Debug)]
pub struct SpaceTimeTable {
    grid: Grid,
    times: Vec<f64>,
    weights: Vec<f64>,
    slices: Vec<DMatrix<f64>>,
    power: f64,
    sup_norms: Vec<f64>,
}

impl SpaceTimeTable {
    pub fn new(
        grid: Grid,
        times: Vec<f64>,
        weights: Vec<f64>,
        slices: Vec<DMatrix<f64>>,
        power: f64,
    ) -> Result<Self> {
        if times.is_empty() || times[0] <= 0.0 || times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(ParametrixError::InvalidArgument(
                "times must be positive and strictly increasing".into(),
            ));
        }
        let n = grid.len();
        if weights.len() != n
            || slices.len() != times.len()
            || slices.iter().any(|m| m.nrows() != n || m.ncols() != n)
        {
            return Err(ParametrixError::InvalidArgument(
                "slice shapes do not match grid/times".into(),
            ));
        }
        if !power.is_finite() || power < 0.0 {
            return Err(ParametrixError::InvalidArgument(format!(
                "nominal power must be finite and nonnegative, got {power}"
            )));
        }
        let sup_norms = slices.iter().map(|m| m.amax()).collect();
        Ok(SpaceTimeTable { grid, times, weights, slices, power, sup_norms })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn slice(&self, idx: usize) -> &DMatrix<f64> {
        &self.slices[idx]
    }

    pub fn sup_norm(&self, idx: usize) -> f64 {
        self.sup_norms[idx]
    }

    pub fn sup_norm_max(&self) -> f64 {
        self.sup_norms.iter().copied().fold(0.0, f64::max)
    }

    pub fn add(&self, other: &SpaceTimeTable) -> Result<SpaceTimeTable> {
        check_shared_structure(self, other)?;
        let slices = self
            .slices
            .iter()
            .zip(&other.slices)
            .map(|(a, b)| a + b)
            .collect();
        SpaceTimeTable::new(
            self.grid.clone(),
            self.times.clone(),
            self.weights.clone(),
            slices,
            self.power.max(other.power),
        )
    }

    pub fn scale(&self, factor: f64) -> SpaceTimeTable {
        let mut out = self.clone();
        for slice in &mut out.slices {
            *slice *= factor;
        }
        for sup in &mut out.sup_norms {
            *sup *= factor.abs();
        }
        out
    }
}

impl TimeKernel for SpaceTimeTable {
    fn grid(&self) -> &Grid {
        &self.grid
    }

    fn times(&self) -> &[f64] {
        &self.times
    }

    fn weights(&self) -> &[f64] {
        &self.weights
    }

    fn power(&self) -> f64 {
        self.power
    }

    fn floor(&self) -> f64 {
        self.times[0].max(resolution_floor(&self.grid))
    }

    fn slice_at(&self, t: f64) -> Result<DMatrix<f64>> {
        if !(t > 0.0) || !t.is_finite() {
            return Err(ParametrixError::InvalidArgument(format!("need t > 0, got {t}")));
        }
        if let Some(i) = self.times.iter().position(|&ti| (ti - t).abs() <= 1e-9 * ti) {
            return Ok(self.slices[i].clone());
        }
        let first = self.times[0];
        let last = *self.times.last().unwrap();
        if t < first || t > last {
            return Err(ParametrixError::InvalidArgument(format!(
                "t = {t:.3e} outside the stored range [{first:.3e}, {last:.3e}]; \
                 tables never extrapolate in time"
            )));
        }
        // Cubic Lagrange in ln t on power-normalized slices: with values
        // ~ t^{−q} the normalized data t^q·M is slowly varying, so a short
        // stencil on the geometric time grid interpolates it cleanly.
        let len = self.times.len();
        let hi = self.times.partition_point(|&ti| ti < t);
        let count = len.min(4);
        let start = if len <= 4 { 0 } else { (hi.max(2) - 2).min(len - 4) };
        let x = t.ln();
        let xs: Vec<f64> = (start..start + count).map(|i| self.times[i].ln()).collect();
        let n = self.grid.len();
        let mut out = DMatrix::zeros(n, n);
        for (k, i) in (start..start + count).enumerate() {
            let mut w = 1.0;
            for (l, &xl) in xs.iter().enumerate() {
                if l != k {
                    w *= (x - xl) / (xs[k] - xl);
                }
            }
            out += &self.slices[i] * (w * (self.times[i] / t).powf(self.power));
        }
        Ok(out)
    }

    fn stored_sup_norms(&self) -> &[f64] {
        &self.sup_norms
    }
}

/// Least-squares slope of log sup|K(t)| against log t over stored times in
/// [t_lo, t_hi]. Returns 0 when fewer than two usable points exist (e.g. a
/// zero table): a vanishing kernel is as regular as they come.
pub fn measured_singularity_in<K: TimeKernel + ?Sized>(kernel: &K, t_lo: f64, t_hi: f64) -> f64 {
    let pts: Vec<(f64, f64)> = kernel
        .times()
        .iter()
        .zip(kernel.stored_sup_norms())
        .filter(|(&t, &s)| t >= t_lo && t <= t_hi && s > 0.0)
        .map(|(&t, &s)| (t.ln(), s.ln()))
        .collect();
    slope(&pts)
}

/// Default singularity fit: up to six stored times starting at 8× the floor,
/// where quadrature-boundary effects have died out; falls back to the last
/// four stored times when the range is too short.
pub fn measured_singularity<K: TimeKernel + ?Sized>(kernel: &K) -> f64 {
    let lo = 8.0 * kernel.floor();
    let pts: Vec<(f64, f64)> = kernel
        .times()
        .iter()
        .zip(kernel.stored_sup_norms())
        .filter(|(&t, &s)| t >= lo && s > 0.0)
        .take(6)
        .map(|(&t, &s)| (t.ln(), s.ln()))
        .collect();
    if pts.len() >= 2 {
        return slope(&pts);
    }
    let tail: Vec<(f64, f64)> = kernel
        .times()
        .iter()
        .zip(kernel.stored_sup_norms())
        .filter(|(_, &s)| s > 0.0)
        .map(|(&t, &s)| (t.ln(), s.ln()))
        .collect();
    let keep = tail.len().saturating_sub(4);
    slope(&tail[keep..])
}

fn slope(pts: &[(f64, f64)]) -> f64 {
    if pts.len() < 2 {
        return 0.0;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    sxy / sxx
}

/// The graded quadrature nodes (s, weight) that `spacetime_convolve` uses at
/// output time t, given the two factors' floors. Exposed so composition
/// checks can probe the exact node set.
pub fn quadrature_nodes(t: f64, bottom_floor: f64, top_floor: f64, panels: usize) -> Vec<(f64, f64)> {
    let mut nodes = Vec::new();
    let sigma_hi = 0.5f64.powf(0.25);
    // Bottom half: s = tσ⁴.
    let sigma_lo = (bottom_floor / t).powf(0.25);
    if sigma_lo < sigma_hi {
        let step = (sigma_hi - sigma_lo) / panels as f64;
        for p in 0..panels {
            let a = sigma_lo + p as f64 * step;
            for (sigma, w) in gl16_points(a, a + step) {
                let s = t * sigma.powi(4);
                nodes.push((s, w * 4.0 * t * sigma.powi(3)));
            }
        }
    }
    // Top half: t − s = tυ⁴.
    let ups_lo = (top_floor / t).powf(0.25);
    if ups_lo < sigma_hi {
        let step = (sigma_hi - ups_lo) / panels as f64;
        for p in 0..panels {
            let a = ups_lo + p as f64 * step;
            for (ups, w) in gl16_points(a, a + step) {
                let tau = t * ups.powi(4);
                nodes.push((t - tau, w * 4.0 * t * ups.powi(3)));
            }
        }
    }
    nodes
}

/// One output time of A∗B with the given panel count.
pub(crate) fn convolve_at<A: TimeKernel + ?Sized, B: TimeKernel + ?Sized>(
    a: &A,
    b: &B,
    t: f64,
    panels: usize,
) -> Result<DMatrix<f64>> {
    let grid = b.grid();
    let n = grid.len();
    let w = b.weights();
    let half = 0.5 * t;
    let s_floor = b.floor();
    let tau_floor = a.floor();
    let mut acc = DMatrix::zeros(n, n);

    let sigma_hi = 0.5f64.powf(0.25);
    // Bottom half: s ∈ [s_floor, t/2].
    let sigma_lo = (s_floor / t).powf(0.25);
    if sigma_lo < sigma_hi {
        let step = (sigma_hi - sigma_lo) / panels as f64;
        for p in 0..panels {
            let lo = sigma_lo + p as f64 * step;
            for (sigma, wq) in gl16_points(lo, lo + step) {
                let s = t * sigma.powi(4);
                let ws = wq * 4.0 * t * sigma.powi(3);
                let left = a.slice_at(t - s)?;
                let right = b.slice_at(s)?;
                weighted_product_into(&mut acc, ws, &left, w, &right);
            }
        }
    }
    // Top half: τ = t − s ∈ [tau_floor, t/2].
    let ups_lo = (tau_floor / t).powf(0.25);
    if ups_lo < sigma_hi {
        let step = (sigma_hi - ups_lo) / panels as f64;
        for p in 0..panels {
            let lo = ups_lo + p as f64 * step;
            for (ups, wq) in gl16_points(lo, lo + step) {
                let tau = t * ups.powi(4);
                let ws = wq * 4.0 * t * ups.powi(3);
                let left = a.slice_at(tau)?;
                let right = b.slice_at(t - tau)?;
                weighted_product_into(&mut acc, ws, &left, w, &right);
            }
        }
    }

    // Bottom sliver [0, min(s_floor, t/2)]: B has no stored data there, but
    // its columns converge to fixed measures whose moments above the
    // operator's order die out as s → 0. Couple moments 0..=4 of the spike at
    // the floor to the matching source-argument derivatives of A at the
    // sliver midpoint; truncating earlier leaves an O(s_c/t) hole near the
    // floor, and going higher buys nothing for a fourth-order operator.
    let s_c = s_floor.min(half);
    if s_c > 0.0 {
        let spike = b.slice_at(s_floor)?;
        let moments = column_moments(grid, &spike, w);
        let a_mid = a.slice_at((t - 0.5 * s_c).max(tau_floor))?;
        let mut factorial = 1.0;
        for (k, mk) in moments.iter().enumerate() {
            if k > 0 {
                factorial *= k as f64;
            }
            let coupled = if k == 0 { None } else { Some(derivative_rows(grid, &a_mid, k)?) };
            let da = coupled.as_ref().unwrap_or(&a_mid);
            for j in 0..n {
                let c = mk[j] * s_c / factorial;
                for i in 0..n {
                    acc[(i, j)] += da[(i, j)] * c;
                }
            }
        }
    }
    // Top sliver: A is the spike; same closure with row moments against B's
    // first-argument derivatives.
    let tau_c = tau_floor.min(half);
    if tau_c > 0.0 {
        let spike = a.slice_at(tau_floor)?;
        let moments = row_moments(grid, &spike, w);
        let b_near = b.slice_at((t - 0.5 * tau_c).max(s_floor))?;
        let mut factorial = 1.0;
        for (k, rk) in moments.iter().enumerate() {
            if k > 0 {
                factorial *= k as f64;
            }
            let coupled = if k == 0 { None } else { Some(derivative_columns(grid, &b_near, k)?) };
            let db = coupled.as_ref().unwrap_or(&b_near);
            for i in 0..n {
                let c = rk[i] * tau_c / factorial;
                for j in 0..n {
                    acc[(i, j)] += c * db[(i, j)];
                }
            }
        }
    }
    Ok(acc)
}

/// acc += scale · L · diag(w) · R.
fn weighted_product_into(
    acc: &mut DMatrix<f64>,
    scale: f64,
    left: &DMatrix<f64>,
    w: &[f64],
    right: &DMatrix<f64>,
) {
    let mut rw = right.clone();
    for (j, &wj) in w.iter().enumerate() {
        let mut row = rw.row_mut(j);
        row *= wj;
    }
    acc.gemm(scale, left, &rw, 1.0);
}

/// Weighted column moments Σ_ξ (ξ−y)^k B(ξ,y)dV for k = 0..=4.
fn column_moments(grid: &Grid, m: &DMatrix<f64>, w: &[f64]) -> [Vec<f64>; 5] {
    let n = grid.len();
    let mut moments: [Vec<f64>; 5] = std::array::from_fn(|_| vec![0.0; n]);
    for j in 0..n {
        for i in 0..n {
            let v = m[(i, j)] * w[i];
            let d = signed_displacement(grid, i, j);
            let mut power = 1.0;
            for mk in moments.iter_mut() {
                mk[j] += v * power;
                power *= d;
            }
        }
    }
    moments
}

/// Weighted row moments Σ_ξ (ξ−x)^k A(x,ξ)dV for k = 0..=4.
fn row_moments(grid: &Grid, m: &DMatrix<f64>, w: &[f64]) -> [Vec<f64>; 5] {
    let n = grid.len();
    let mut moments: [Vec<f64>; 5] = std::array::from_fn(|_| vec![0.0; n]);
    for i in 0..n {
        for j in 0..n {
            let v = m[(i, j)] * w[j];
            let d = signed_displacement(grid, j, i);
            let mut power = 1.0;
            for mk in moments.iter_mut() {
                mk[i] += v * power;
                power *= d;
            }
        }
    }
    moments
}

fn signed_displacement(grid: &Grid, from: usize, base: usize) -> f64 {
    let period = grid.period();
    let mut d = (grid.coord(from) - grid.coord(base)).rem_euclid(period);
    if d >= 0.5 * period {
        d -= period;
    }
    d
}

fn check_compatible<A: TimeKernel + ?Sized, B: TimeKernel + ?Sized>(a: &A, b: &B) -> Result<()> {
    let (ga, gb) = (a.grid(), b.grid());
    if ga.len() != gb.len()
        || ga.dim() != gb.dim()
        || (ga.period() - gb.period()).abs() > 1e-12 * ga.period()
    {
        return Err(ParametrixError::InvalidArgument(
            "convolution factors live on different grids".into(),
        ));
    }
    if a.times().len() != b.times().len()
        || a.times()
            .iter()
            .zip(b.times())
            .any(|(&ta, &tb)| (ta - tb).abs() > 1e-9 * ta)
    {
        return Err(ParametrixError::InvalidArgument(
            "convolution factors must share their stored times".into(),
        ));
    }
    if a.weights()
        .iter()
        .zip(b.weights())
        .any(|(&wa, &wb)| (wa - wb).abs() > 1e-12 * wa.abs().max(wb.abs()))
    {
        return Err(ParametrixError::InvalidArgument(
            "convolution factors carry different volume weights".into(),
        ));
    }
    Ok(())
}

fn check_shared_structure(a: &SpaceTimeTable, b: &SpaceTimeTable) -> Result<()> {
    check_compatible(a, b)
}

/// A∗B on the shared stored times.
pub fn spacetime_convolve<A: TimeKernel + ?Sized, B: TimeKernel + ?Sized>(
    a: &A,
    b: &B,
) -> Result<SpaceTimeTable> {
    check_compatible(a, b)?;
    // Lemma hypotheses: both factors must be integrably singular. The order
    // is measured, not assumed; t^{−(n+4)/4} (exponent −5/4 here) is the
    // non-integrable boundary.
    let limit = -(DIM + 4.0) / 4.0;
    for (name, rho) in [("left", measured_singularity(a)), ("right", measured_singularity(b))] {
        if rho <= limit + 1e-9 {
            return Err(ParametrixError::InvalidArgument(format!(
                "{name} factor's measured singularity exponent {rho:.3} is not integrable \
                 (needs > {limit})"
            )));
        }
    }
    let times = b.times().to_vec();
    let slices: Vec<DMatrix<f64>> = times
        .par_iter()
        .map(|&t| convolve_at(a, b, t, PANELS))
        .collect::<Result<_>>()?;
    // Refinement check at the largest output time: the graded panels must
    // already be converged there, else the time grid is too coarse for the
    // requested horizon.
    let t_star = *times.last().unwrap();
    let fine = convolve_at(a, b, t_star, 2 * PANELS)?;
    let coarse = slices.last().unwrap();
    let scale = coarse.amax().max(f64::MIN_POSITIVE);
    let defect = (coarse - &fine).amax();
    if defect > 1e-6 * scale {
        return Err(ParametrixError::NumericalFailure(format!(
            "convolution quadrature defect {:.2e} (relative) at t = {t_star:.3e}; \
             double the panel count or refine the stored time grid",
            defect / scale
        )));
    }
    let power = (a.power() + b.power() - (DIM + 4.0) / 4.0).max(0.0);
    SpaceTimeTable::new(
        b.grid().clone(),
        times,
        b.weights().to_vec(),
        slices,
        power,
    )
}
