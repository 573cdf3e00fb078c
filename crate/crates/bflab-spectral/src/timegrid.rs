use crate::error::{Result, SpectralError};
use crate::field::SpectralField;
use crate::grid::Grid;

/// Default ratio of consecutive times on geometric grids. Weighted norms
/// weigh by powers of t, so resolution must be logarithmic near t = 0.
pub const DEFAULT_TIME_RATIO: f64 = 1.189_207_115_002_721_1; // 2^(1/4)

/// Ascending geometric time grid t_j = t_max · ratio^{-(count-1-j)}.
pub fn geometric_times(t_max: f64, ratio: f64, count: usize) -> Result<Vec<f64>> {
    if !(t_max > 0.0) {
        return Err(SpectralError::InvalidArgument(format!(
            "t_max must be positive, got {t_max}"
        )));
    }
    if !(ratio > 1.0) {
        return Err(SpectralError::InvalidArgument(format!(
            "ratio must exceed 1, got {ratio}"
        )));
    }
    if count == 0 {
        return Err(SpectralError::InvalidArgument("count must be positive".into()));
    }
    Ok((0..count)
        .map(|j| t_max * ratio.powi(-((count - 1 - j) as i32)))
        .collect())
}

/// A time-indexed family of fields on one grid; houses trajectories u(·, t).
#[derive(Debug, Clone)]
pub struct SpaceTimeField {
    times: Vec<f64>,
    slices: Vec<SpectralField>,
}

impl SpaceTimeField {
    pub fn new(times: Vec<f64>, slices: Vec<SpectralField>) -> Result<Self> {
        if times.len() != slices.len() {
            return Err(SpectralError::InvalidArgument(format!(
                "{} times but {} slices",
                times.len(),
                slices.len()
            )));
        }
        if times.is_empty() {
            return Err(SpectralError::InsufficientData("no time slices".into()));
        }
        if !times.iter().all(|t| *t > 0.0 && t.is_finite()) {
            return Err(SpectralError::InvalidArgument(
                "all times must be positive and finite".into(),
            ));
        }
        if !times.windows(2).all(|w| w[0] < w[1]) {
            return Err(SpectralError::InvalidArgument(
                "times must be strictly increasing".into(),
            ));
        }
        let grid = slices[0].grid().clone();
        for s in &slices {
            if *s.grid() != grid {
                return Err(SpectralError::GridMismatch(
                    "all slices must share one grid".into(),
                ));
            }
        }
        Ok(SpaceTimeField { times, slices })
    }

    pub fn from_fn(
        grid: &Grid,
        times: Vec<f64>,
        f: impl Fn(f64, f64, f64) -> f64,
    ) -> Result<Self> {
        let slices = times
            .iter()
            .map(|&t| SpectralField::from_fn(grid.clone(), |x, y| f(x, y, t)))
            .collect();
        SpaceTimeField::new(times, slices)
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn time(&self, j: usize) -> f64 {
        self.times[j]
    }

    pub fn slice(&self, j: usize) -> &SpectralField {
        &self.slices[j]
    }

    pub fn slices(&self) -> &[SpectralField] {
        &self.slices
    }

    pub fn grid(&self) -> &Grid {
        self.slices[0].grid()
    }

    /// Restriction to slices with t ≤ t_cut.
    pub fn restrict_to(&self, t_cut: f64) -> Result<SpaceTimeField> {
        let keep = self.times.iter().take_while(|t| **t <= t_cut).count();
        if keep == 0 {
            return Err(SpectralError::InsufficientData(format!(
                "no slices at or below t = {t_cut}"
            )));
        }
        SpaceTimeField::new(self.times[..keep].to_vec(), self.slices[..keep].to_vec())
    }

    pub fn map_slices(&self, f: impl Fn(&SpectralField) -> SpectralField) -> Result<SpaceTimeField> {
        let slices = self.slices.iter().map(&f).collect();
        SpaceTimeField::new(self.times.clone(), slices)
    }

    /// Slice-wise linear combination a·self + b·other on matching time grids.
    pub fn linear_combination(&self, a: f64, other: &SpaceTimeField, b: f64) -> Result<SpaceTimeField> {
        if self.times.len() != other.times.len()
            || self
                .times
                .iter()
                .zip(&other.times)
                .any(|(s, o)| (s - o).abs() > 1e-14 * s.max(*o))
        {
            return Err(SpectralError::InvalidArgument(
                "time grids do not match".into(),
            ));
        }
        let slices = self
            .slices
            .iter()
            .zip(&other.slices)
            .map(|(s, o)| s.scale(a).add(&o.scale(b)))
            .collect::<Result<Vec<_>>>()?;
        SpaceTimeField::new(self.times.clone(), slices)
    }

    /// Largest |u| over all slices and nodes.
    pub fn sup_norm(&self) -> f64 {
        self.slices.iter().map(|s| s.sup_norm()).fold(0.0, f64::max)
    }
}
