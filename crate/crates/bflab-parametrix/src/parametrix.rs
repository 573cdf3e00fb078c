//! The Levi parametrix: chart-frozen profiles glued by the partition.
//!
//! On each chart ν the generator is frozen at the source point y, where the
//! exact constant-coefficient kernel is G(x−y; a(y)t) with a = (g¹¹)². The
//! parametrix glues these through the partition of unity,
//!
//!   Z(x,y;t) = Σ_ν ψ_ν(x) · G(x−y; a(y)t) · φ_ν(y) / c(y),
//!
//! the 1/c(y) converting the Lebesgue-normalized profile into a kernel
//! against the volume element dV = c·dy. Z reproduces initial data as
//! t → 0 and satisfies the equation up to the defect worked out in the
//! sibling module.

use nalgebra::DMatrix;
use rayon::prelude::*;

use bflab_kernel::MetricSpec;
use bflab_spectral::{Grid, SpectralField};

use crate::charts::ChartCover;
use crate::convolve::{resolution_floor, SpaceTimeTable, TimeKernel};
use crate::error::{ParametrixError, Result};
use crate::frozen::FrozenKernelFamily;

/// Pascal rows for the Leibniz expansion of ∂ₓ^k(ψ_ν·G).
const BINOMIAL: [[f64; 5]; 5] = [
    [1.0, 0.0, 0.0, 0.0, 0.0],
    [1.0, 1.0, 0.0, 0.0, 0.0],
    [1.0, 2.0, 1.0, 0.0, 0.0],
    [1.0, 3.0, 3.0, 1.0, 0.0],
    [1.0, 4.0, 6.0, 4.0, 1.0],
];

/// Frozen-coefficient parametrix on a chart cover, stored on a time grid
/// but re-evaluable exactly at any positive time.
#[derive(Debug)]
pub struct ParametrixTable {
    data: SpaceTimeTable,
    cover: ChartCover,
    family: FrozenKernelFamily,
    metric: MetricSpec,
}

/// Builds the parametrix for `metric` on `times`, gluing `n_charts` equal
/// charts around the torus.
pub fn build_parametrix(
    metric: &MetricSpec,
    grid: &Grid,
    times: &[f64],
    n_charts: usize,
) -> Result<ParametrixTable> {
    if grid.len() != metric.grid().len()
        || (grid.period() - metric.grid().period()).abs() > 1e-12 * grid.period()
    {
        return Err(ParametrixError::InvalidArgument(
            "grid does not match the metric's grid".into(),
        ));
    }
    if times.is_empty() || times[0] <= 0.0 || times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(ParametrixError::InvalidArgument(
            "times must be positive and strictly increasing".into(),
        ));
    }
    let cover = ChartCover::new(grid.clone(), n_charts)?;
    let family = FrozenKernelFamily::new(metric)?;
    let n = grid.len();
    let weights: Vec<f64> = (0..n)
        .map(|i| family.conformal_factor(i) * grid.node_weight())
        .collect();
    let slices: Vec<DMatrix<f64>> = times
        .par_iter()
        .map(|&t| assemble_slice(&cover, &family, t))
        .collect::<Result<_>>()?;
    let data = SpaceTimeTable::new(grid.clone(), times.to_vec(), weights, slices, 0.25)?;
    Ok(ParametrixTable { data, cover, family, metric: metric.clone() })
}

fn assemble_slice(cover: &ChartCover, family: &FrozenKernelFamily, t: f64) -> Result<DMatrix<f64>> {
    if !(t > 0.0) {
        return Err(ParametrixError::InvalidArgument(format!("need t > 0, got {t}")));
    }
    let n = cover.grid().len();
    let mut m = DMatrix::zeros(n, n);
    for nu in 0..cover.n_charts() {
        let phi = cover.phi(nu).samples();
        let psi = cover.psi(nu).samples();
        let sources: Vec<usize> = (0..n).filter(|&j| phi[j] > 0.0).collect();
        let fields: Vec<usize> = (0..n).filter(|&i| psi[i] > 0.0).collect();
        for &j in &sources {
            let pref = phi[j] / family.conformal_factor(j);
            for &i in &fields {
                let u = cover.displacement(nu, i, j);
                m[(i, j)] += psi[i] * family.derivative(0, u, t, j)? * pref;
            }
        }
    }
    Ok(m)
}

impl ParametrixTable {
    pub fn grid(&self) -> &Grid {
        self.data.grid()
    }

    pub fn metric(&self) -> &MetricSpec {
        &self.metric
    }

    pub fn cover(&self) -> &ChartCover {
        &self.cover
    }

    pub fn family(&self) -> &FrozenKernelFamily {
        &self.family
    }

    pub fn data(&self) -> &SpaceTimeTable {
        &self.data
    }

    /// ∂ₓ^k of the parametrix at time t, by the Leibniz rule through the
    /// cutoffs (exact jet derivatives) and the frozen profiles.
    pub fn derivative_slice(&self, k: usize, t: f64) -> Result<DMatrix<f64>> {
        if k > 4 {
            return Err(ParametrixError::InvalidArgument(format!(
                "spatial derivatives are tabulated up to order 4, got {k}"
            )));
        }
        if !(t > 0.0) {
            return Err(ParametrixError::InvalidArgument(format!("need t > 0, got {t}")));
        }
        let n = self.grid().len();
        let mut m = DMatrix::zeros(n, n);
        for nu in 0..self.cover.n_charts() {
            let phi = self.cover.phi(nu).samples();
            let psi = self.cover.psi(nu).samples();
            let sources: Vec<usize> = (0..n).filter(|&j| phi[j] > 0.0).collect();
            let fields: Vec<usize> = (0..n).filter(|&i| psi[i] > 0.0).collect();
            for &j in &sources {
                let pref = phi[j] / self.family.conformal_factor(j);
                for &i in &fields {
                    let u = self.cover.displacement(nu, i, j);
                    let mut sum = 0.0;
                    for order in 0..=k {
                        let cut = if order == 0 {
                            psi[i]
                        } else {
                            self.cover.psi_derivative(nu, i, order)
                        };
                        if cut != 0.0 {
                            sum += BINOMIAL[k][order]
                                * cut
                                * self.family.derivative(k - order, u, t, j)?;
                        }
                    }
                    m[(i, j)] += sum * pref;
                }
            }
        }
        Ok(m)
    }

    /// sup_x |∫Z(x,y;t)u(y)dV(y) − u(x)|: how well the parametrix
    /// reproduces initial data at small t.
    pub fn initial_trace_error(&self, u: &SpectralField, t: f64) -> Result<f64> {
        if u.grid().len() != self.grid().len() {
            return Err(ParametrixError::InvalidArgument(
                "field lives on a different grid".into(),
            ));
        }
        let slice = self.slice_at(t)?;
        let w = self.data.weights();
        let samples = u.samples();
        let mut worst: f64 = 0.0;
        for i in 0..self.grid().len() {
            let mut acc = 0.0;
            for j in 0..self.grid().len() {
                acc += slice[(i, j)] * w[j] * samples[j];
            }
            worst = worst.max((acc - samples[i]).abs());
        }
        Ok(worst)
    }
}

impl TimeKernel for ParametrixTable {
    fn grid(&self) -> &Grid {
        self.data.grid()
    }

    fn times(&self) -> &[f64] {
        self.data.times()
    }

    fn weights(&self) -> &[f64] {
        self.data.weights()
    }

    fn power(&self) -> f64 {
        0.25
    }

    fn floor(&self) -> f64 {
        // Profile-backed: trustworthy down to the spatial resolution limit,
        // regardless of which times happen to be stored.
        resolution_floor(self.data.grid())
    }

    fn slice_at(&self, t: f64) -> Result<DMatrix<f64>> {
        assemble_slice(&self.cover, &self.family, t)
    }

    fn stored_sup_norms(&self) -> &[f64] {
        self.data.stored_sup_norms()
    }
}

/// Geometric time grid (ratio 2^{1/4}) descending from `horizon` to the
/// spatial resolution floor — the natural storage grid for kernel tables on
/// `grid`. Fails when the horizon is too close to the floor to fit a usable
/// ladder.
pub fn resolved_time_grid(grid: &Grid, horizon: f64) -> Result<Vec<f64>> {
    if !(horizon > 0.0) || !horizon.is_finite() {
        return Err(ParametrixError::InvalidArgument(format!(
            "need a positive horizon, got {horizon}"
        )));
    }
    let floor = resolution_floor(grid);
    let ratio = 2f64.powf(0.25);
    let mut times = Vec::new();
    let mut t = horizon;
    while t >= floor {
        times.push(t);
        t /= ratio;
    }
    times.reverse();
    if times.len() < 4 {
        return Err(ParametrixError::InvalidArgument(format!(
            "horizon {horizon:.3e} allows only {} stored times above the resolution \
             floor {floor:.3e}; enlarge the horizon or refine the grid",
            times.len()
        )));
    }
    Ok(times)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn resolved_grid_is_geometric_and_floored() {
        let grid = Grid::standard(1, 64).unwrap();
        let times = resolved_time_grid(&grid, 0.1).unwrap();
        let floor = resolution_floor(&grid);
        assert!(times[0] >= floor);
        assert!(times[0] / 2f64.powf(0.25) < floor);
        assert_eq!(*times.last().unwrap(), 0.1);
        for w in times.windows(2) {
            assert!((w[1] / w[0] - 2f64.powf(0.25)).abs() < 1e-12);
        }
    }

    #[test]
    fn tight_horizon_is_rejected() {
        let grid = Grid::standard(1, 64).unwrap();
        let floor = resolution_floor(&grid);
        assert!(resolved_time_grid(&grid, 1.5 * floor).is_err());
    }

    #[test]
    fn mismatched_grid_is_rejected() {
        let grid = Grid::standard(1, 64).unwrap();
        let other = Grid::standard(1, 128).unwrap();
        let metric = MetricSpec::flat(other);
        let err = build_parametrix(&metric, &grid, &[0.01, 0.02], 4).unwrap_err();
        assert!(matches!(err, ParametrixError::InvalidArgument(_)));
    }

    #[test]
    fn zeroth_derivative_matches_the_slice() {
        let grid = Grid::standard(1, 64).unwrap();
        let metric = MetricSpec::flat(grid.clone());
        let z = build_parametrix(&metric, &grid, &[0.01], 4).unwrap();
        let a = z.slice_at(0.01).unwrap();
        let b = z.derivative_slice(0, 0.01).unwrap();
        assert_eq!(a, b);
    }
}
