//! The parametrix defect K = −(∂_t + Δ_g²)Z.
//!
//! Inside a chart the frozen kernel solves ∂_tG + a(y)∂⁴G = 0 exactly, so
//! applying the true operator to Z = Σ_ν ψ_ν(x)G(x−y;a(y)t)φ_ν(y)/c(y)
//! leaves three structurally distinct remainders:
//!
//!   freezing:     ψ_ν·(a(x) − a(y))·∂⁴G        — the coefficient was frozen
//!                 at y; vanishes linearly on the diagonal, which is what
//!                 buys the extra quarter-power of t per iteration;
//!   lower-order:  ψ_ν·(A₃∂³ + A₂∂² + A₁∂)G     — Δ_g² is a₄∂⁴ plus lower
//!                 derivatives with variable coefficients;
//!   cutoff:       every Leibniz term where at least one derivative lands
//!                 on ψ_ν — supported in the transition annuli, far from the
//!                 diagonal, hence exponentially small as t → 0.
//!
//! K = −Σ_ν (freezing + lower + cutoff)·φ_ν(y)/c(y). The three groups are
//! stored separately so their provenance and relative sizes stay auditable.

use nalgebra::DMatrix;
use rayon::prelude::*;

use bflab_kernel::MetricSpec;
use bflab_spectral::Grid;

use crate::charts::ChartCover;
use crate::convolve::{resolution_floor, SpaceTimeTable, TimeKernel};
use crate::error::{ParametrixError, Result};
use crate::frozen::FrozenKernelFamily;
use crate::operator::OperatorCoefficients;
use crate::parametrix::ParametrixTable;

/// Which remainder of the frozen-coefficient calculation a value belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DefectGroup {
    /// (a(x) − a(y))·∂⁴G: the frozen leading coefficient.
    Freezing,
    /// A₃∂³G + A₂∂²G + A₁∂G: variable lower-order terms of Δ_g².
    LowerOrder,
    /// All terms with derivatives on the cutoff ψ_ν.
    Cutoff,
}

/// The defect of a parametrix, split into its three groups, stored on the
/// parametrix's time grid and re-evaluable exactly at any positive time.
pub struct DefectTable {
    total: SpaceTimeTable,
    groups: [Vec<DMatrix<f64>>; 3],
    cover: ChartCover,
    family: FrozenKernelFamily,
    coeffs: OperatorCoefficients,
}

/// Applies −(∂_t + Δ_g²) to the parametrix analytically.
pub fn defect(parametrix: &ParametrixTable, metric: &MetricSpec) -> Result<DefectTable> {
    let grid = parametrix.grid();
    if grid.len() != metric.grid().len()
        || (grid.period() - metric.grid().period()).abs() > 1e-12 * grid.period()
    {
        return Err(ParametrixError::InvalidArgument(
            "metric grid does not match the parametrix grid".into(),
        ));
    }
    let family = FrozenKernelFamily::new(metric)?;
    for i in 0..grid.len() {
        let (ours, theirs) = (family.coefficient(i), parametrix.family().coefficient(i));
        if (ours - theirs).abs() > 1e-12 * ours.abs() {
            return Err(ParametrixError::InvalidArgument(
                "metric does not match the one the parametrix was built from".into(),
            ));
        }
    }
    let coeffs = OperatorCoefficients::new(metric)?;
    let cover = ChartCover::new(grid.clone(), parametrix.cover().n_charts())?;
    let times = parametrix.times().to_vec();

    let per_time: Vec<[DMatrix<f64>; 3]> = times
        .par_iter()
        .map(|&t| groups_at(&cover, &family, &coeffs, t))
        .collect::<Result<_>>()?;
    let mut groups: [Vec<DMatrix<f64>>; 3] = [Vec::new(), Vec::new(), Vec::new()];
    let mut totals = Vec::with_capacity(times.len());
    for [fr, lo, cut] in per_time {
        totals.push(&fr + &lo + &cut);
        groups[0].push(fr);
        groups[1].push(lo);
        groups[2].push(cut);
    }
    let total = SpaceTimeTable::new(
        grid.clone(),
        times,
        parametrix.weights().to_vec(),
        totals,
        1.0,
    )?;
    Ok(DefectTable { total, groups, cover, family, coeffs })
}

/// The three defect groups at time t. Signs already include the leading
/// minus of K = −(∂_t + Δ_g²)Z.
fn groups_at(
    cover: &ChartCover,
    family: &FrozenKernelFamily,
    coeffs: &OperatorCoefficients,
    t: f64,
) -> Result<[DMatrix<f64>; 3]> {
    if !(t > 0.0) {
        return Err(ParametrixError::InvalidArgument(format!("need t > 0, got {t}")));
    }
    let n = cover.grid().len();
    let a = coeffs.leading();
    let a3 = coeffs.third();
    let a2 = coeffs.second();
    let a1 = coeffs.first();
    let mut freezing = DMatrix::zeros(n, n);
    let mut lower = DMatrix::zeros(n, n);
    let mut cutoff = DMatrix::zeros(n, n);
    for nu in 0..cover.n_charts() {
        let phi = cover.phi(nu).samples();
        let psi = cover.psi(nu).samples();
        let sources: Vec<usize> = (0..n).filter(|&j| phi[j] > 0.0).collect();
        let fields: Vec<usize> = (0..n).filter(|&i| psi[i] > 0.0).collect();
        for &j in &sources {
            let pref = -phi[j] / family.conformal_factor(j);
            let a_frozen = family.coefficient(j);
            for &i in &fields {
                let u = cover.displacement(nu, i, j);
                let mut g = [0.0; 5];
                for (k, slot) in g.iter_mut().enumerate() {
                    *slot = family.derivative(k, u, t, j)?;
                }
                freezing[(i, j)] += pref * psi[i] * (a[i] - a_frozen) * g[4];
                lower[(i, j)] += pref * psi[i] * (a3[i] * g[3] + a2[i] * g[2] + a1[i] * g[1]);
                let p1 = cover.psi_derivative(nu, i, 1);
                let p2 = cover.psi_derivative(nu, i, 2);
                let p3 = cover.psi_derivative(nu, i, 3);
                let p4 = cover.psi_derivative(nu, i, 4);
                if p1 != 0.0 || p2 != 0.0 || p3 != 0.0 || p4 != 0.0 {
                    let from_leading =
                        a[i] * (4.0 * p1 * g[3] + 6.0 * p2 * g[2] + 4.0 * p3 * g[1] + p4 * g[0]);
                    let from_third = a3[i] * (3.0 * p1 * g[2] + 3.0 * p2 * g[1] + p3 * g[0]);
                    let from_second = a2[i] * (2.0 * p1 * g[1] + p2 * g[0]);
                    let from_first = a1[i] * p1 * g[0];
                    cutoff[(i, j)] += pref * (from_leading + from_third + from_second + from_first);
                }
            }
        }
    }
    Ok([freezing, lower, cutoff])
}

impl DefectTable {
    pub fn grid(&self) -> &Grid {
        self.total.grid()
    }

    /// The summed defect as a stored table.
    pub fn total(&self) -> &SpaceTimeTable {
        &self.total
    }

    /// Stored slices of one group, aligned with `times()`.
    pub fn group_slices(&self, group: DefectGroup) -> &[DMatrix<f64>] {
        &self.groups[group_index(group)]
    }

    pub fn group_sup(&self, group: DefectGroup, time_idx: usize) -> f64 {
        self.groups[group_index(group)][time_idx].amax()
    }

    /// Re-evaluates the three groups exactly at any positive time.
    pub fn groups_at(&self, t: f64) -> Result<[DMatrix<f64>; 3]> {
        groups_at(&self.cover, &self.family, &self.coeffs, t)
    }

    /// Largest weighted row integral max_x ∫|K(x,y;t)|dV(y) at a stored time.
    pub fn row_integral(&self, time_idx: usize) -> f64 {
        let slice = self.total.slice(time_idx);
        let w = self.total.weights();
        let n = self.grid().len();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            let mut acc = 0.0;
            for j in 0..n {
                acc += slice[(i, j)].abs() * w[j];
            }
            worst = worst.max(acc);
        }
        worst
    }
}

fn group_index(group: DefectGroup) -> usize {
    match group {
        DefectGroup::Freezing => 0,
        DefectGroup::LowerOrder => 1,
        DefectGroup::Cutoff => 2,
    }
}

impl TimeKernel for DefectTable {
    fn grid(&self) -> &Grid {
        self.total.grid()
    }

    fn times(&self) -> &[f64] {
        self.total.times()
    }

    fn weights(&self) -> &[f64] {
        self.total.weights()
    }

    fn power(&self) -> f64 {
        1.0
    }

    fn floor(&self) -> f64 {
        resolution_floor(self.total.grid())
    }

    fn slice_at(&self, t: f64) -> Result<DMatrix<f64>> {
        let [fr, lo, cut] = self.groups_at(t)?;
        Ok(fr + lo + cut)
    }

    fn stored_sup_norms(&self) -> &[f64] {
        self.total.stored_sup_norms()
    }
}
