//! Integer-order Bessel J via the cosine integral representation.

use std::f64::consts::PI;

/// J_m(x) = (1/π)∫₀^π cos(mθ − x sin θ) dθ. The integrand extends to an even
/// 2π-periodic entire function, so the trapezoid rule converges spectrally;
/// the node count tracks the highest effective Fourier mode m + |x|.
pub fn bessel_j(order: i32, x: f64) -> f64 {
    let m = order.unsigned_abs();
    let sign = if order < 0 && m % 2 == 1 { -1.0 } else { 1.0 };
    let nodes = 64 + 2 * (m as usize + x.abs().ceil() as usize);
    let h = PI / nodes as f64;
    let integrand = |theta: f64| (m as f64 * theta - x * theta.sin()).cos();
    let mut acc = 0.5 * (integrand(0.0) + integrand(PI));
    for j in 1..nodes {
        acc += integrand(j as f64 * h);
    }
    sign * acc * h / PI
}

/// k-th derivative of J₀: J₀^(k)(z) = 2^{−k} Σ_i (−1)^i C(k,i) J_{2i−k}(z),
/// from iterating J_ν' = (J_{ν−1} − J_{ν+1})/2.
pub fn bessel_j0_derivative(k: usize, z: f64) -> f64 {
    let mut acc = 0.0;
    for i in 0..=k {
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        acc += sign * binomial(k, i) * bessel_j(2 * i as i32 - k as i32, z);
    }
    acc / 2f64.powi(k as i32)
}

pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let mut acc = 1.0;
    for i in 0..k.min(n - k) {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classical_values() {
        assert!((bessel_j(0, 0.0) - 1.0).abs() < 1e-15);
        // First zero of J₀.
        assert!(bessel_j(0, 2.404_825_557_695_773).abs() < 1e-13);
        assert!((bessel_j(1, 1.0) - 0.440_050_585_744_933_5).abs() < 1e-13);
        // Small-argument series J_m(x) ≈ (x/2)^m / m!.
        let x = 1e-3;
        assert!((bessel_j(3, x) - (x / 2.0).powi(3) / 6.0).abs() < 1e-14);
    }

    #[test]
    fn recurrence_holds() {
        for &x in &[0.7, 3.3, 11.0, 42.5] {
            for m in 1..=6 {
                let lhs = bessel_j(m - 1, x) + bessel_j(m + 1, x);
                let rhs = 2.0 * m as f64 / x * bessel_j(m, x);
                assert!((lhs - rhs).abs() < 1e-12, "m={m} x={x}");
            }
        }
    }

    #[test]
    fn negative_orders_reflect() {
        for &x in &[0.9, 4.2] {
            assert!((bessel_j(-3, x) + bessel_j(3, x)).abs() < 1e-15);
            assert!((bessel_j(-4, x) - bessel_j(4, x)).abs() < 1e-15);
        }
    }

    #[test]
    fn derivative_formula_matches_finite_difference() {
        let h = 1e-5;
        for &z in &[0.8, 2.5, 7.0] {
            for k in 1..=4 {
                let fd = (bessel_j0_derivative(k - 1, z + h) - bessel_j0_derivative(k - 1, z - h))
                    / (2.0 * h);
                let exact = bessel_j0_derivative(k, z);
                assert!((fd - exact).abs() < 1e-8, "k={k} z={z}");
            }
        }
    }

    #[test]
    fn binomial_row() {
        assert_eq!(binomial(6, 0), 1.0);
        assert_eq!(binomial(6, 3), 20.0);
        assert_eq!(binomial(6, 6), 1.0);
        assert_eq!(binomial(2, 5), 0.0);
    }
}
