//! Tabulated Euclidean kernel profiles B_k(r) = ∂_r^k b₀(r; 1) shared by all
//! frozen kernels.
//!
//! Every frozen kernel is a rescaling of the unit-time Euclidean profile, so
//! one table per derivative order serves the whole family. Values come from
//! the adaptive oscillatory integrals in `bflab_kernel`; between nodes we use
//! cubic Hermite interpolation whose slopes are themselves exact, since
//! B_k′ = B_{k+1} (differentiating under the integral shifts the phase by
//! π/2). With spacing 0.01 the interpolation error is below 1e-11, comfortably
//! inside every tolerance this crate promises.

use std::sync::OnceLock;

use rayon::prelude::*;

use bflab_kernel::euclidean_point;

/// Highest derivative order served. The defect expansion needs orders 0..=4;
/// 5 and 6 are kept for derivative-slice diagnostics. Order 7 exists only as
/// the Hermite slope table for order 6.
pub(crate) const MAX_ORDER: usize = 6;

/// Tail cutoff: |B₀(34)| ≈ 6e-13, so truncating to zero beyond this radius
/// stays within the 1e-9 agreement promised for flat-metric parametrices.
pub(crate) const R_MAX: f64 = 34.0;

const DR: f64 = 0.01;

#[derive(Debug)]
pub(crate) struct FrozenProfiles {
    /// values[k][i] = B_k(i·DR) for k = 0..=MAX_ORDER+1.
    values: Vec<Vec<f64>>,
}

impl FrozenProfiles {
    fn build() -> Self {
        let count = (R_MAX / DR).round() as usize + 1;
        let values: Vec<Vec<f64>> = (0..=MAX_ORDER + 1)
            .map(|k| {
                (0..count)
                    .into_par_iter()
                    .map(|i| {
                        euclidean_point(1, k, 1.0, i as f64 * DR)
                            .expect("euclidean profile evaluation cannot fail for t = 1")
                    })
                    .collect()
            })
            .collect();
        FrozenProfiles { values }
    }

    /// B_k(r) for signed r, using the parity B_k(−r) = (−1)^k B_k(r).
    pub fn eval(&self, k: usize, r: f64) -> f64 {
        debug_assert!(k <= MAX_ORDER);
        let a = r.abs();
        if a >= R_MAX {
            return 0.0;
        }
        let cell = (a / DR).floor() as usize;
        let cell = cell.min(self.values[k].len() - 2);
        let u = (a - cell as f64 * DR) / DR;
        let v0 = self.values[k][cell];
        let v1 = self.values[k][cell + 1];
        // Hermite slopes: B_k′ = B_{k+1}, scaled to the unit cell.
        let s0 = self.values[k + 1][cell] * DR;
        let s1 = self.values[k + 1][cell + 1] * DR;
        let u2 = u * u;
        let u3 = u2 * u;
        let h00 = 2.0 * u3 - 3.0 * u2 + 1.0;
        let h10 = u3 - 2.0 * u2 + u;
        let h01 = -2.0 * u3 + 3.0 * u2;
        let h11 = u3 - u2;
        let value = h00 * v0 + h10 * s0 + h01 * v1 + h11 * s1;
        if r < 0.0 && k % 2 == 1 {
            -value
        } else {
            value
        }
    }
}

/// Process-wide table, built on first use (a few seconds, amortized across
/// every kernel this process assembles).
pub(crate) fn profiles() -> &'static FrozenProfiles {
    static TABLES: OnceLock<FrozenProfiles> = OnceLock::new();
    TABLES.get_or_init(FrozenProfiles::build)
}

#[cfg(test)]
mod tests {
    use super::{profiles, R_MAX};
    use bflab_kernel::euclidean_point;

    #[test]
    fn interpolation_matches_direct_integration_off_nodes() {
        let tables = profiles();
        for k in 0..=4 {
            for &r in &[0.0037, 0.5012, 2.3049, 7.7777, 19.404] {
                let direct = euclidean_point(1, k, 1.0, r).unwrap();
                let interp = tables.eval(k, r);
                assert!(
                    (direct - interp).abs() < 1e-10,
                    "order {k} at r={r}: direct {direct:e}, table {interp:e}"
                );
            }
        }
    }

    #[test]
    fn parity_alternates_with_order() {
        let tables = profiles();
        for k in 0..=4 {
            let plus = tables.eval(k, 1.2345);
            let minus = tables.eval(k, -1.2345);
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            assert_eq!(minus, sign * plus);
        }
    }

    #[test]
    fn tail_is_truncated_to_zero_beyond_the_table() {
        let tables = profiles();
        assert_eq!(tables.eval(0, R_MAX + 0.5), 0.0);
        assert_eq!(tables.eval(4, -2.0 * R_MAX), 0.0);
        // The value just inside the boundary is already negligible.
        assert!(tables.eval(0, R_MAX - 0.01).abs() < 1e-11);
    }
}
