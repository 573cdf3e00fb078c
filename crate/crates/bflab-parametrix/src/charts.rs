//! Chart cover of the periodic interval with nested smooth cutoffs.
//!
//! Charts are n equal arcs of the period P with centers p_ν = ν·P/n and a
//! common radius scale r₀ = 1.6·(P/n). Around each center sit three nested
//! regions: the inner cutoff φ_ν has plateau r₀/4 and support r₀/2, and the
//! outer cutoff ψ_ν has plateau 3r₀/4 and support 7r₀/8. Normalizing the
//! inner bumps by their sum makes {φ_ν} an exact partition of unity, and the
//! plateau arithmetic makes ψ_ν ≡ 1 on supp φ_ν exactly, because the
//! mollifier step evaluates to the literal constant 1.0 past its shoulder.
//!
//! All cutoffs derive from the standard exp(−1/s) mollifier. Derivatives up
//! to fourth order (needed by the defect expansion) are evaluated through
//! jet arithmetic rather than spectrally: the transition bands are a fixed
//! fraction of the chart spacing, and on production grids a fourth spectral
//! derivative of so sharp a bump would carry percent-level error.

use bflab_spectral::{Grid, SpectralField};

use crate::error::{ParametrixError, Result};
use crate::jet::Jet4;

/// Ratio of the chart radius scale r₀ to the chart spacing.
const RADIUS_FACTOR: f64 = 1.6;

#[derive(Debug)]
pub struct ChartCover {
    grid: Grid,
    centers: Vec<f64>,
    spacing: f64,
    r0: f64,
    phi: Vec<SpectralField>,
    psi: Vec<SpectralField>,
    /// psi_jets[ν][i] = [ψ_ν, ψ_ν′, ψ_ν″, ψ_ν‴, ψ_ν⁗] at node i.
    psi_jets: Vec<Vec<[f64; 5]>>,
    /// local[ν][i] = node i's coordinate in chart ν, wrapped to [−P/2, P/2).
    local: Vec<Vec<f64>>,
}

impl ChartCover {
    pub fn new(grid: Grid, n_charts: usize) -> Result<Self> {
        if grid.dim() != 1 {
            return Err(ParametrixError::InvalidArgument(format!(
                "chart cover is one-dimensional; got dim {}",
                grid.dim()
            )));
        }
        if n_charts < 2 {
            return Err(ParametrixError::InvalidArgument(format!(
                "need at least 2 charts, got {n_charts}"
            )));
        }
        let period = grid.period();
        let spacing = period / n_charts as f64;
        let r0 = RADIUS_FACTOR * spacing;
        // The outer support 7r₀/8 = 1.4·spacing must fit inside a half
        // period, or a chart's cutoff wraps onto itself and the nesting
        // pattern collapses. With equal arcs that rules out exactly n = 2.
        if 2.0 * psi_support(r0) >= period {
            return Err(ParametrixError::Construction(format!(
                "cutoff nesting impossible: ψ-support diameter {:.3} exceeds the period {:.3}; \
                 use at least 3 charts",
                2.0 * psi_support(r0),
                period
            )));
        }

        let centers: Vec<f64> = (0..n_charts).map(|nu| nu as f64 * spacing).collect();
        let n = grid.len();
        let local: Vec<Vec<f64>> = centers
            .iter()
            .map(|&p| (0..n).map(|i| wrap(grid.coord(i) - p, period)).collect())
            .collect();

        // Inner bumps, then the exact partition by normalization.
        let raw: Vec<Vec<f64>> = local
            .iter()
            .map(|loc| {
                loc.iter().map(|&u| bump_value(u, phi_plateau(r0), phi_support(r0))).collect()
            })
            .collect();
        let mut total = vec![0.0; n];
        for bump in &raw {
            for (acc, v) in total.iter_mut().zip(bump) {
                *acc += v;
            }
        }
        if total.iter().any(|&s| s <= 0.0) {
            return Err(ParametrixError::Construction(
                "inner cutoff supports leave part of the interval uncovered".into(),
            ));
        }
        let phi: Vec<SpectralField> = raw
            .iter()
            .map(|bump| {
                let samples = bump.iter().zip(&total).map(|(v, s)| v / s).collect();
                SpectralField::from_samples(grid.clone(), samples)
            })
            .collect::<std::result::Result<_, _>>()?;

        let psi_jets: Vec<Vec<[f64; 5]>> = local
            .iter()
            .map(|loc| {
                loc.iter().map(|&u| cutoff_jet(u, psi_plateau(r0), psi_support(r0))).collect()
            })
            .collect();
        let psi: Vec<SpectralField> = psi_jets
            .iter()
            .map(|jets| {
                let samples = jets.iter().map(|j| j[0]).collect();
                SpectralField::from_samples(grid.clone(), samples)
            })
            .collect::<std::result::Result<_, _>>()?;

        let cover = ChartCover { grid, centers, spacing, r0, phi, psi, psi_jets, local };
        let defect = cover.partition_defect();
        if defect > 1e-12 {
            return Err(ParametrixError::Construction(format!(
                "partition of unity defect {defect:.3e} exceeds 1e-12"
            )));
        }
        Ok(cover)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn n_charts(&self) -> usize {
        self.centers.len()
    }

    pub fn centers(&self) -> &[f64] {
        &self.centers
    }

    pub fn chart_spacing(&self) -> f64 {
        self.spacing
    }

    /// Radius scale r₀; the nested radii below are fixed fractions of it.
    pub fn radius_scale(&self) -> f64 {
        self.r0
    }

    pub fn phi_plateau_radius(&self) -> f64 {
        phi_plateau(self.r0)
    }

    pub fn phi_support_radius(&self) -> f64 {
        phi_support(self.r0)
    }

    pub fn psi_plateau_radius(&self) -> f64 {
        psi_plateau(self.r0)
    }

    pub fn psi_support_radius(&self) -> f64 {
        psi_support(self.r0)
    }

    pub fn phi(&self, nu: usize) -> &SpectralField {
        &self.phi[nu]
    }

    pub fn psi(&self, nu: usize) -> &SpectralField {
        &self.psi[nu]
    }

    /// k-th derivative of ψ_ν at node i (k = 0 is the value itself).
    pub fn psi_derivative(&self, nu: usize, node: usize, k: usize) -> f64 {
        self.psi_jets[nu][node][k]
    }

    /// Node i's coordinate in chart ν, wrapped to [−P/2, P/2).
    pub fn local_coordinate(&self, nu: usize, node: usize) -> f64 {
        self.local[nu][node]
    }

    /// Chart-local displacement between nodes x and y. Both endpoints are
    /// wrapped relative to the chart center first; wrapping their difference
    /// instead would fold genuinely large displacements (the cutoff product
    /// reaches past a half spacing) back into small ones.
    pub fn displacement(&self, nu: usize, x_node: usize, y_node: usize) -> f64 {
        self.local[nu][x_node] - self.local[nu][y_node]
    }

    /// max over nodes of |Σ_ν φ_ν − 1|.
    pub fn partition_defect(&self) -> f64 {
        (0..self.grid.len())
            .map(|i| {
                let sum: f64 = self.phi.iter().map(|phi| phi.value(i)).sum();
                (sum - 1.0).abs()
            })
            .fold(0.0, f64::max)
    }
}

fn phi_plateau(r0: f64) -> f64 {
    0.25 * r0
}

fn phi_support(r0: f64) -> f64 {
    0.5 * r0
}

fn psi_plateau(r0: f64) -> f64 {
    0.75 * r0
}

fn psi_support(r0: f64) -> f64 {
    0.875 * r0
}

fn wrap(u: f64, period: f64) -> f64 {
    let mut v = u.rem_euclid(period);
    if v >= 0.5 * period {
        v -= period;
    }
    v
}

/// Smooth step built from f(s) = exp(−1/s): exactly 0 for s ≤ 0 and exactly
/// 1 for s ≥ 1 — the plateau identities below rely on the literal constants.
fn step_value(s: f64) -> f64 {
    if s <= 0.0 {
        return 0.0;
    }
    if s >= 1.0 {
        return 1.0;
    }
    let f = (-1.0 / s).exp();
    let g = (-1.0 / (1.0 - s)).exp();
    f / (f + g)
}

/// Bump of the given plateau and support radii evaluated at local coordinate u.
fn bump_value(u: f64, plateau: f64, support: f64) -> f64 {
    step_value((support - u.abs()) / (support - plateau))
}

/// Value and first four derivatives (with respect to u) of the same bump.
fn cutoff_jet(u: f64, plateau: f64, support: f64) -> [f64; 5] {
    let a = u.abs();
    if a >= support {
        return [0.0; 5];
    }
    if a <= plateau {
        return [1.0, 0.0, 0.0, 0.0, 0.0];
    }
    // In the transition band the composition is smooth: s(u) is affine with
    // slope ∓1/width, and the step jet chains through exp(−1/s) exactly.
    let width = support - plateau;
    let slope = -u.signum() / width;
    let s = Jet4::constant((support - a) / width)
        .add(&Jet4::variable(0.0).mul(&Jet4::constant(slope)));
    let f = Jet4::constant(-1.0).div(&s).exp();
    let g = Jet4::constant(-1.0).div(&Jet4::constant(1.0).add(&s.neg())).exp();
    let step = f.div(&f.add(&g));
    [
        step.value(),
        step.derivative(1),
        step.derivative(2),
        step.derivative(3),
        step.derivative(4),
    ]
}
