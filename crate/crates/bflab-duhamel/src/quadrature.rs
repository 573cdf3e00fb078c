//! Endpoint-graded quadrature for the Duhamel integral ∫₀ᵗ S(t−s) f(s) ds.
//!
//! Both endpoints are delicate: f may blow up like s^{−1/2} at s = 0, and
//! derivative bounds on S(t−s) degrade as s → t. Substituting s = tσ⁴ on the
//! lower half and s = t(1−σ⁴) on the upper half absorbs every power
//! singularity s^p with p ≥ −3/4 into a polynomial in σ — in particular the
//! borderline source class s^{−1/2} becomes linear — after which composite
//! Gauss–Legendre panels in σ converge at machine speed.
//!
//! Nodes carry both s and t−s explicitly: near the upper endpoint t−s = tσ⁴
//! is known exactly, while recomputing it as a difference would cancel away
//! most of its precision.

use bflab_kernel::gl16_points;

#[derive(Clone, Copy)]
pub(crate) struct DuhamelNode {
    /// Source time s ∈ (0, t).
    pub s: f64,
    /// Propagation time t − s, formed without cancellation.
    pub remaining: f64,
    /// Quadrature weight including the substitution Jacobian.
    pub weight: f64,
}

/// Quadrature nodes for ∫₀ᵗ · ds, graded toward both endpoints.
/// `panels_per_side` composite GL16 panels cover σ ∈ [0, 2^{−1/4}] on each
/// half; weights sum to t exactly up to roundoff. Nodes are strictly inside
/// (0, t) and returned in ascending s order.
pub(crate) fn graded_nodes(t: f64, panels_per_side: usize) -> Vec<DuhamelNode> {
    debug_assert!(t > 0.0 && panels_per_side > 0);
    // σ = 2^{−1/4} maps to s = t/2, so the two halves tile [0, t] exactly.
    let split = 0.5f64.powf(0.25);
    let width = split / panels_per_side as f64;
    let mut nodes = Vec::with_capacity(32 * panels_per_side);
    for panel in 0..panels_per_side {
        let left = panel as f64 * width;
        for (sigma, w) in gl16_points(left, left + width) {
            let graded = t * sigma.powi(4);
            let weight = w * 4.0 * t * sigma.powi(3);
            nodes.push(DuhamelNode { s: graded, remaining: t - graded, weight });
            nodes.push(DuhamelNode { s: t - graded, remaining: graded, weight });
        }
    }
    nodes.sort_by(|a, b| a.s.partial_cmp(&b.s).expect("finite nodes"));
    nodes
}

#[cfg(test)]
mod tests {
    use super::*;

    fn integrate(t: f64, panels: usize, f: impl Fn(&DuhamelNode) -> f64) -> f64 {
        graded_nodes(t, panels).iter().map(|node| node.weight * f(node)).sum()
    }

    #[test]
    fn weights_sum_to_the_interval_length() {
        for &t in &[0.01f64, 1.0, 7.0] {
            let total: f64 = graded_nodes(t, 6).iter().map(|node| node.weight).sum();
            assert!((total - t).abs() < 1e-13 * t);
        }
    }

    #[test]
    fn nodes_stay_strictly_inside_the_interval() {
        let nodes = graded_nodes(0.5, 8);
        assert!(nodes.iter().all(|n| n.s > 0.0 && n.s < 0.5 && n.weight > 0.0));
        assert!(nodes.iter().all(|n| n.remaining > 0.0 && n.remaining < 0.5));
        assert!(nodes.windows(2).all(|p| p[0].s <= p[1].s));
    }

    #[test]
    fn endpoint_singularities_integrate_to_machine_precision() {
        // ∫₀ᵗ s^{−1/2} ds = 2√t: polynomial after the lower substitution.
        let t = 0.8;
        let value = integrate(t, 6, |n| 1.0 / n.s.sqrt());
        assert!((value - 2.0 * t.sqrt()).abs() < 1e-12);
        // Mirror singularity in t−s at the upper endpoint.
        let value = integrate(t, 6, |n| 1.0 / n.remaining.sqrt());
        assert!((value - 2.0 * t.sqrt()).abs() < 1e-12);
        // The s^{−3/4} borderline of the substitution is still exact.
        let value = integrate(t, 6, |n| n.s.powf(-0.75));
        assert!((value - 4.0 * t.powf(0.25)).abs() < 1e-12);
    }

    #[test]
    fn smooth_integrands_converge_with_few_panels() {
        let t = 1.3;
        let value = integrate(t, 6, |n| (-n.remaining).exp());
        assert!((value - (1.0 - (-t).exp())).abs() < 1e-14);
    }
}
