//! Conformal-perturbation metrics g = c(x)² dx² with c = 1 + ε·profile.

use bflab_spectral::{Grid, SpectralField};

use crate::error::{KernelError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MetricKind {
    Flat,
    ConformalPerturbation,
}

#[derive(Debug, Clone)]
pub struct MetricSpec {
    kind: MetricKind,
    epsilon: f64,
    profile: SpectralField,
}

impl MetricSpec {
    pub fn flat(grid: Grid) -> Self {
        MetricSpec {
            kind: MetricKind::Flat,
            epsilon: 0.0,
            profile: SpectralField::zeros(grid),
        }
    }

    pub fn conformal(profile: SpectralField, epsilon: f64) -> Result<Self> {
        if !epsilon.is_finite() {
            return Err(KernelError::InvalidArgument(format!("epsilon must be finite, got {epsilon}")));
        }
        if epsilon == 0.0 {
            return Ok(MetricSpec::flat(profile.grid().clone()));
        }
        let spec = MetricSpec { kind: MetricKind::ConformalPerturbation, epsilon, profile };
        let min = spec.coefficient_field().min();
        if min <= 0.0 {
            return Err(KernelError::InvalidArgument(format!(
                "coefficient field must stay positive; min(1 + ε·profile) = {min}"
            )));
        }
        Ok(spec)
    }

    pub fn kind(&self) -> MetricKind {
        self.kind
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn profile(&self) -> &SpectralField {
        &self.profile
    }

    pub fn grid(&self) -> &Grid {
        self.profile.grid()
    }

    pub fn dim(&self) -> usize {
        self.profile.grid().dim()
    }

    pub fn is_flat(&self) -> bool {
        self.kind == MetricKind::Flat
    }

    /// c = 1 + ε·profile.
    pub fn coefficient_field(&self) -> SpectralField {
        self.profile.scale(self.epsilon).add_scalar(1.0)
    }
}
