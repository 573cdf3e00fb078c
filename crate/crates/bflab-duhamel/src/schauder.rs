//! The uniform Schauder-ratio experiment: ‖V[f]‖_{X_T} / ‖f‖_{Y_T}.
//!
//! The estimate behind the fixed-point argument says this ratio is bounded
//! by a constant that does not degrade as T → 0 or as the metric moves away
//! from flat. The experiment computes the two norm estimators on a shared
//! geometric time grid and reports their ratio; stability across horizons
//! and perturbation sizes is the check downstream suites assert.

use std::io::Write;

use bflab_kernel::MetricSpec;
use bflab_norms::{x_norm, y_norm};
use bflab_spectral::SpaceTimeField;

use crate::error::{DuhamelError, Result};
use crate::potential::volume_potential;
use crate::propagator::Propagator;

#[derive(Debug, Clone)]
pub struct SchauderRatioRecord {
    /// Perturbation amplitude of the metric the potential was built on.
    pub epsilon: f64,
    /// Horizon T of the weighted norms.
    pub t_cap: f64,
    /// Hölder exponent α shared by both norms.
    pub alpha: f64,
    /// ‖V[f]‖_{X_T} estimator total.
    pub x_norm: f64,
    /// ‖f‖_{Y_T} estimator total.
    pub y_norm: f64,
    /// The Schauder quotient x_norm / y_norm.
    pub ratio: f64,
}

impl SchauderRatioRecord {
    pub fn csv_header() -> &'static str {
        "epsilon,T,alpha,x_norm,y_norm,ratio"
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
            self.epsilon, self.t_cap, self.alpha, self.x_norm, self.y_norm, self.ratio
        )
    }
}

pub fn write_ratio_csv<W: Write>(records: &[SchauderRatioRecord], out: &mut W) -> std::io::Result<()> {
    writeln!(out, "{}", SchauderRatioRecord::csv_header())?;
    for record in records {
        writeln!(out, "{}", record.csv_row())?;
    }
    Ok(())
}

/// Build V[f] on the metric's natural propagator and take the norm quotient.
/// The source must be nonzero — the quotient of a zero source is noise.
pub fn schauder_ratio(
    metric: &MetricSpec,
    f: &SpaceTimeField,
    t_cap: f64,
    alpha: f64,
) -> Result<SchauderRatioRecord> {
    let propagator = Propagator::for_metric(metric)?;
    let y = y_norm(f, alpha, t_cap)?;
    if y.total() <= 0.0 {
        return Err(DuhamelError::InvalidArgument(
            "Schauder ratio needs a source with positive Y-norm".into(),
        ));
    }
    let v = volume_potential(&propagator, f, t_cap)?;
    let x = x_norm(&v, alpha, t_cap)?;
    Ok(SchauderRatioRecord {
        epsilon: metric.epsilon(),
        t_cap,
        alpha,
        x_norm: x.total(),
        y_norm: y.total(),
        ratio: x.total() / y.total(),
    })
}
