//! Final assembly b = Z + Z∗Ψ and its validation against the semigroup
//! oracle.
//!
//! Validation is a measurement, not an assertion: the report carries one row
//! per requested time with the oracle row-L¹ gap, the mass defect, and the
//! PDE residual, and `passed()` compares them against the pinned tolerances.
//! A failing report is still returned — the caller decides what to do with
//! a kernel that missed its error budget.

use nalgebra::DMatrix;
use rayon::prelude::*;

use bflab_kernel::{Construction, KernelTable, Operator};

use crate::convolve::{convolve_at, SpaceTimeTable, TimeKernel, PANELS};
use crate::error::{ParametrixError, Result};
use crate::neumann::NeumannSeries;
use crate::operator::OperatorCoefficients;
use crate::parametrix::ParametrixTable;

/// Largest acceptable relative row-L¹ gap against the oracle.
pub const ROW_L1_TOL: f64 = 1e-3;
/// Largest acceptable |row mass − 1|.
pub const MASS_TOL: f64 = 1e-6;
/// Largest acceptable ‖∂_t b + Δ_g²b‖ / ‖Δ_g²b‖.
pub const PDE_TOL: f64 = 1e-4;

/// Relative half-width of the time stencil for the PDE residual.
const STENCIL_ETA: f64 = 0.005;

/// b = Z + Z∗Ψ on the stored times, packaged as a kernel table.
pub fn assemble_kernel(z: &ParametrixTable, psi: &NeumannSeries) -> Result<KernelTable> {
    let table = psi.psi();
    check_shared(z, table)?;
    let times = z.times().to_vec();
    let matrices: Vec<DMatrix<f64>> = if table.sup_norm_max() == 0.0 {
        (0..times.len()).map(|i| z.data().slice(i).clone()).collect()
    } else {
        times
            .par_iter()
            .enumerate()
            .map(|(i, &t)| Ok(z.data().slice(i) + convolve_at(z, table, t, PANELS)?))
            .collect::<Result<_>>()?
    };
    let operator = if z.metric().is_flat() { Operator::Flat } else { Operator::Perturbed };
    Ok(KernelTable::from_parts(
        z.grid().clone(),
        times,
        z.weights().to_vec(),
        matrices,
        operator,
        Construction::Parametrix,
    )?)
}

/// One fresh slice of b = Z + Z∗Ψ at an arbitrary time inside Ψ's range.
fn assemble_at(z: &ParametrixTable, psi: &SpaceTimeTable, t: f64) -> Result<DMatrix<f64>> {
    let mut slice = z.slice_at(t)?;
    if psi.sup_norm_max() > 0.0 {
        slice += convolve_at(z, psi, t, PANELS)?;
    }
    Ok(slice)
}

fn check_shared(z: &ParametrixTable, psi: &SpaceTimeTable) -> Result<()> {
    let (gz, gp) = (z.grid(), psi.grid());
    if gz.len() != gp.len() || (gz.period() - gp.period()).abs() > 1e-12 * gz.period() {
        return Err(ParametrixError::InvalidArgument(
            "parametrix and series live on different grids".into(),
        ));
    }
    if z.times().len() != psi.times().len()
        || z.times()
            .iter()
            .zip(psi.times())
            .any(|(&a, &b)| (a - b).abs() > 1e-9 * a)
    {
        return Err(ParametrixError::InvalidArgument(
            "parametrix and series must share their stored times".into(),
        ));
    }
    Ok(())
}

/// One validated time.
#[derive(Clone, Debug)]
pub struct ValidationRow {
    pub t: f64,
    /// max over x of ∫|b − oracle|dV(y) / ∫|oracle|dV(y).
    pub row_l1_error: f64,
    /// max over x of |∫b dV(y) − 1|.
    pub mass_error: f64,
    /// ‖∂_t b + Δ_g²b‖_sup / ‖Δ_g²b‖_sup, time derivative by a stencil of
    /// freshly assembled slices at t(1 ± η).
    pub pde_residual: f64,
}

/// Per-time validation table for an assembled kernel.
#[derive(Clone, Debug)]
pub struct ValidationReport {
    rows: Vec<ValidationRow>,
}

impl ValidationReport {
    pub fn rows(&self) -> &[ValidationRow] {
        &self.rows
    }

    /// All rows within the pinned tolerances.
    pub fn passed(&self) -> bool {
        !self.rows.is_empty()
            && self.rows.iter().all(|r| {
                r.row_l1_error <= ROW_L1_TOL && r.mass_error <= MASS_TOL && r.pde_residual <= PDE_TOL
            })
    }

    /// Writes `t,row_l1_error,mass_error,pde_residual`.
    pub fn write_csv(&self, path: &std::path::Path) -> std::io::Result<()> {
        use std::io::Write as _;
        let mut out = std::fs::File::create(path)?;
        writeln!(out, "t,row_l1_error,mass_error,pde_residual")?;
        for r in &self.rows {
            writeln!(
                out,
                "{:.16e},{:.16e},{:.16e},{:.16e}",
                r.t, r.row_l1_error, r.mass_error, r.pde_residual
            )?;
        }
        Ok(())
    }
}

/// Measures the assembled kernel against the semigroup oracle at the
/// requested times (each must be one of the oracle's stored times). Returns
/// the report whether or not the bounds hold.
pub fn validate_assembly(
    z: &ParametrixTable,
    psi: &NeumannSeries,
    oracle: &KernelTable,
    times: &[f64],
) -> Result<ValidationReport> {
    let table = psi.psi();
    check_shared(z, table)?;
    let grid = z.grid();
    if oracle.grid().len() != grid.len()
        || (oracle.grid().period() - grid.period()).abs() > 1e-12 * grid.period()
    {
        return Err(ParametrixError::InvalidArgument(
            "oracle lives on a different grid".into(),
        ));
    }
    if times.is_empty() {
        return Err(ParametrixError::InvalidArgument("no validation times given".into()));
    }
    let coeffs = OperatorCoefficients::new(z.metric())?;
    let w = z.weights();
    let n = grid.len();
    let t_last = *table.times().last().unwrap();

    let rows = times
        .par_iter()
        .map(|&t| -> Result<ValidationRow> {
            let oracle_idx = oracle
                .times()
                .iter()
                .position(|&ti| (ti - t).abs() <= 1e-9 * t)
                .ok_or_else(|| {
                    ParametrixError::InvalidArgument(format!(
                        "t = {t:.6e} is not one of the oracle's stored times"
                    ))
                })?;
            let reference = oracle.dense_slice(oracle_idx);
            let b = assemble_at(z, table, t)?;

            let mut row_l1_error: f64 = 0.0;
            let mut mass_error: f64 = 0.0;
            for i in 0..n {
                let mut gap = 0.0;
                let mut scale = 0.0;
                let mut mass = 0.0;
                for j in 0..n {
                    gap += (b[(i, j)] - reference[(i, j)]).abs() * w[j];
                    scale += reference[(i, j)].abs() * w[j];
                    mass += b[(i, j)] * w[j];
                }
                row_l1_error = row_l1_error.max(gap / scale);
                mass_error = mass_error.max((mass - 1.0).abs());
            }

            // Time derivative from fresh assemblies; one-sided at the top
            // of the stored range, central elsewhere.
            let h = STENCIL_ETA * t;
            let db_dt = if t * (1.0 + STENCIL_ETA) <= t_last * (1.0 + 1e-12) {
                let plus = assemble_at(z, table, t + h)?;
                let minus = assemble_at(z, table, t - h)?;
                (plus - minus) / (2.0 * h)
            } else {
                let m1 = assemble_at(z, table, t - h)?;
                let m2 = assemble_at(z, table, t - 2.0 * h)?;
                (b.clone() * 3.0 - m1 * 4.0 + m2) / (2.0 * h)
            };
            let lb = coeffs.apply_columns(&b)?;
            let residual = (&db_dt + &lb).amax();
            let pde_residual = residual / lb.amax();

            Ok(ValidationRow { t, row_l1_error, mass_error, pde_residual })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(ValidationReport { rows })
}
