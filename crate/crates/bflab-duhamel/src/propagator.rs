//! The initial-value propagator S_g(t) = e^{−tΔ_g²} behind one interface.
//!
//! Three backends share it. The flat path multiplies Fourier coefficients by
//! e^{−|ξ|⁴t} and is exact for the truncated series; the reference path
//! applies the dense eigendecomposition of Δ_g² and works at any time, which
//! Duhamel quadrature requires; the table path replays precomputed kernel
//! rows and deliberately refuses times it does not carry — tables are
//! validated artifacts and interpolating them in time would launder error.

use bflab_kernel::{KernelTable, MetricSpec, ReferenceOperator};
use bflab_spectral::{Grid, SpaceTimeField, SpectralField};
use rayon::prelude::*;

use crate::error::{DuhamelError, Result};

/// Relative slack when matching a requested time against a table time.
const TIME_MATCH_REL: f64 = 1e-12;

enum Backend {
    Flat,
    Reference(Box<ReferenceOperator>),
    Table(Box<KernelTable>),
}

pub struct Propagator {
    grid: Grid,
    epsilon: Option<f64>,
    backend: Backend,
}

impl Propagator {
    /// Exact spectral multiplier for the flat metric; any dimension.
    pub fn flat(grid: Grid) -> Self {
        Propagator { grid, epsilon: Some(0.0), backend: Backend::Flat }
    }

    /// Dense eigendecomposition of Δ_g²; one-dimensional, any time.
    pub fn reference(metric: &MetricSpec) -> Result<Self> {
        let op = ReferenceOperator::new(metric, metric.grid())?;
        Ok(Propagator {
            grid: metric.grid().clone(),
            epsilon: Some(metric.epsilon()),
            backend: Backend::Reference(Box::new(op)),
        })
    }

    /// The cheapest faithful backend for the metric: spectral multiplier
    /// when flat, eigendecomposition otherwise.
    pub fn for_metric(metric: &MetricSpec) -> Result<Self> {
        if metric.is_flat() {
            Ok(Propagator::flat(metric.grid().clone()))
        } else {
            Propagator::reference(metric)
        }
    }

    /// Replay precomputed kernel rows; only the table's own times work.
    pub fn from_table(table: KernelTable) -> Self {
        Propagator {
            grid: table.grid().clone(),
            epsilon: None,
            backend: Backend::Table(Box::new(table)),
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// Perturbation amplitude of the underlying metric, when known. Table
    /// backends do not record it.
    pub fn epsilon(&self) -> Option<f64> {
        self.epsilon
    }

    pub fn backend_label(&self) -> &'static str {
        match self.backend {
            Backend::Flat => "flat-spectral",
            Backend::Reference(_) => "reference-eigen",
            Backend::Table(_) => "table-rows",
        }
    }

    /// Whether `apply` accepts arbitrary times (as Duhamel quadrature needs)
    /// or only a pre-agreed list.
    pub fn supports_arbitrary_times(&self) -> bool {
        !matches!(self.backend, Backend::Table(_))
    }

    /// Apply S(t) to a field.
    pub fn apply(&self, u: &SpectralField, t: f64) -> Result<SpectralField> {
        if u.grid() != &self.grid {
            return Err(DuhamelError::InvalidArgument(
                "field grid does not match the propagator grid".into(),
            ));
        }
        if !t.is_finite() || t < 0.0 {
            return Err(DuhamelError::InvalidArgument(format!(
                "propagation time must be >= 0, got {t}"
            )));
        }
        match &self.backend {
            Backend::Flat => Ok(u.apply_symbol(|xx, xy| {
                let q = xx * xx + xy * xy;
                (-q * q * t).exp()
            })),
            Backend::Reference(op) => Ok(op.propagate(u, t)?),
            Backend::Table(table) => {
                let t_idx = table
                    .times()
                    .iter()
                    .position(|&tt| (tt - t).abs() <= TIME_MATCH_REL * tt.abs().max(1.0))
                    .ok_or_else(|| {
                        DuhamelError::ExplicitTimes(format!(
                            "kernel table carries times {:?}, not {t}",
                            table.times()
                        ))
                    })?;
                let n = self.grid.len();
                let weights = table.weights();
                let samples: Vec<f64> = (0..n)
                    .map(|i| {
                        let row = table.row(i, t_idx);
                        row.iter().zip(weights).zip(u.samples()).map(|((b, w), v)| b * w * v).sum()
                    })
                    .collect();
                Ok(SpectralField::from_samples(self.grid.clone(), samples)?)
            }
        }
    }

    /// Solve the initial-value problem at the requested times: u(t) = S(t)u₀.
    pub fn propagate_initial(&self, u0: &SpectralField, times: &[f64]) -> Result<SpaceTimeField> {
        let slices: Vec<SpectralField> =
            times.par_iter().map(|&t| self.apply(u0, t)).collect::<Result<_>>()?;
        Ok(SpaceTimeField::new(times.to_vec(), slices)?)
    }

    /// Mass functional ∫u dV_g the semigroup conserves: the flat node sum, or
    /// the c-weighted sum for a perturbed metric. Table backends use their
    /// stored quadrature weights.
    pub fn mass_integral(&self, u: &SpectralField) -> Result<f64> {
        if u.grid() != &self.grid {
            return Err(DuhamelError::InvalidArgument(
                "field grid does not match the propagator grid".into(),
            ));
        }
        match &self.backend {
            Backend::Flat => Ok(u.integral()),
            Backend::Reference(op) => {
                let c = op.metric().coefficient_field();
                Ok(u.samples().iter().zip(c.samples()).map(|(v, w)| v * w).sum::<f64>()
                    * self.grid.spacing())
            }
            Backend::Table(table) => {
                Ok(u.samples().iter().zip(table.weights()).map(|(v, w)| v * w).sum())
            }
        }
    }

    /// Largest deviation of S(t)·1 from 1 over the given times. The
    /// semigroup fixes constants exactly; this is the backend's honesty
    /// check, and every backend here keeps it below 1e-9.
    pub fn unit_defect(&self, times: &[f64]) -> Result<f64> {
        let one = SpectralField::constant(self.grid.clone(), 1.0);
        let mut worst = 0.0f64;
        for &t in times {
            let image = self.apply(&one, t)?;
            let defect =
                image.samples().iter().map(|v| (v - 1.0).abs()).fold(0.0f64, f64::max);
            worst = worst.max(defect);
        }
        Ok(worst)
    }
}
