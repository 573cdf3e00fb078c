//! Per-time weighted smoothing profiles: t^{l+k/4}·‖∂_t^l ∇^k ∂∂̄ u(t)‖₀
//! along a trajectory, with companion log-log slope fits of the unweighted
//! values against t.

use bflab_spectral::SpaceTimeField;

use crate::error::{NormError, Result};
use crate::tensor::{complex_hessian, sup_tensor_norm};
use crate::time_deriv::time_derivative;

#[derive(Debug, Clone, Copy)]
pub struct SmoothingRow {
    pub t: f64,
    pub k: usize,
    pub l: usize,
    pub weighted_value: f64,
    pub raw_value: f64,
}

#[derive(Debug, Clone)]
pub struct SmoothingProfile {
    rows: Vec<SmoothingRow>,
}

impl SmoothingProfile {
    pub fn rows(&self) -> &[SmoothingRow] {
        &self.rows
    }

    /// Rows for one (k, l) in time order.
    pub fn series(&self, k: usize, l: usize) -> Vec<SmoothingRow> {
        self.rows.iter().copied().filter(|r| r.k == k && r.l == l).collect()
    }

    /// Least-squares slope of ln(raw value) against ln t for one (k, l);
    /// the smoothing-rate diagnostic (−k/4 for merely bounded data).
    pub fn loglog_slope(&self, k: usize, l: usize) -> Result<f64> {
        let pts: Vec<(f64, f64)> = self
            .series(k, l)
            .into_iter()
            .filter(|r| r.raw_value > 0.0)
            .map(|r| (r.t.ln(), r.raw_value.ln()))
            .collect();
        if pts.len() < 2 {
            return Err(NormError::InsufficientData(format!(
                "slope fit for k={k}, l={l} needs 2 positive rows, has {}",
                pts.len()
            )));
        }
        let n = pts.len() as f64;
        let sx: f64 = pts.iter().map(|p| p.0).sum();
        let sy: f64 = pts.iter().map(|p| p.1).sum();
        let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
        let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
        Ok((n * sxy - sx * sy) / (n * sxx - sx * sx))
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,k,l,weighted_value,raw_value\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{:.16e},{},{},{:.16e},{:.16e}\n",
                r.t, r.k, r.l, r.weighted_value, r.raw_value
            ));
        }
        out
    }
}

/// Weighted smoothing quantities for k = 0..k_max, l = 0..l_max along the
/// trajectory. The base quantity is the flat-chart complex Hessian ∂∂̄u.
pub fn smoothing_profile(u: &SpaceTimeField, k_max: usize, l_max: usize) -> Result<SmoothingProfile> {
    if k_max > 4 {
        return Err(NormError::InvalidArgument(format!(
            "spatial order capped at 4, got {k_max}"
        )));
    }
    if l_max > 1 {
        return Err(NormError::InvalidArgument(format!(
            "time order capped at 1, got {l_max}"
        )));
    }
    let mut sources = vec![u.clone()];
    if l_max >= 1 {
        sources.push(time_derivative(u)?);
    }
    let mut rows = Vec::new();
    for (l, source) in sources.iter().enumerate() {
        for (j, &t) in source.times().iter().enumerate() {
            let base = complex_hessian(source.slice(j))?;
            for k in 0..=k_max {
                let raw = sup_tensor_norm(&base, k)?;
                rows.push(SmoothingRow {
                    t,
                    k,
                    l,
                    weighted_value: t.powf(l as f64 + k as f64 / 4.0) * raw,
                    raw_value: raw,
                });
            }
        }
    }
    Ok(SmoothingProfile { rows })
}
