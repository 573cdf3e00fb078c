//! Integration tests for the weighted norm estimators: exact weight
//! cancellations, scaling/homogeneity properties, and the divergence
//! detection behavior on purposely borderline trajectories.

use bflab_norms::*;
use bflab_spectral::{geometric_times, Grid, SpaceTimeField};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const ALPHA: f64 = 0.5;

fn random_trajectory(grid: &Grid, times: Vec<f64>, seed: u64) -> SpaceTimeField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coeffs: Vec<(f64, f64, f64)> = (1..=4)
        .map(|k| (k as f64, rng.gen_range(-1.0..1.0), rng.gen_range(0.0..std::f64::consts::TAU)))
        .collect();
    let powers: Vec<f64> = (0..3).map(|_| rng.gen_range(-0.4..0.6)).collect();
    SpaceTimeField::from_fn(grid, times, move |x, y, t| {
        coeffs
            .iter()
            .zip(powers.iter().cycle())
            .map(|(&(k, a, phase), &p)| a * t.powf(p) * (k * (x + 0.3 * y) + phase).sin())
            .sum()
    })
    .unwrap()
}

#[test]
fn zero_trajectories_have_zero_norms() {
    let grid = Grid::standard(1, 32).unwrap();
    let times = geometric_times(0.5, 2.0, 6).unwrap();
    let zero = SpaceTimeField::from_fn(&grid, times, |_, _, _| 0.0).unwrap();
    assert_eq!(y_norm(&zero, ALPHA, 1.0).unwrap().total(), 0.0);
    assert_eq!(x_norm(&zero, ALPHA, 1.0).unwrap().total(), 0.0);
}

#[test]
fn y_weight_cancellation_pins_the_sup_term() {
    // f = t^{-1/2} sin x: the weight cancels, so the weighted sup is exactly
    // ‖sin‖_∞ = 1 on a grid containing x = π/2.
    let grid = Grid::standard(1, 32).unwrap();
    let times = geometric_times(0.5, 2.0, 8).unwrap();
    let f = SpaceTimeField::from_fn(&grid, times, |x, _, t| t.powf(-0.5) * x.sin()).unwrap();
    let report = y_norm(&f, ALPHA, 1.0).unwrap();
    assert!((report.term("weighted_sup").unwrap() - 1.0).abs() < 1e-12);
    assert!(report.total().is_finite());
    assert_eq!(report.terms().len(), 3);
}

#[test]
fn y_norm_detects_borderline_divergence() {
    // f = t^{-3/4} sin x: the weighted sup equals t_min^{-1/4}, so extending
    // the grid two decades toward zero grows the term by 16^{1/4}·... — the
    // estimator sees the divergence instead of saturating.
    let grid = Grid::standard(1, 32).unwrap();
    let shallow = geometric_times(0.5, 2.0, 5).unwrap();
    let deep = geometric_times(0.5, 2.0, 9).unwrap();
    let make = |times: Vec<f64>| {
        SpaceTimeField::from_fn(&grid, times, |x, _, t| t.powf(-0.75) * x.sin()).unwrap()
    };
    let term = |times: Vec<f64>| {
        y_norm(&make(times), ALPHA, 1.0).unwrap().term("weighted_sup").unwrap()
    };
    let shallow_term = term(shallow.clone());
    let deep_term = term(deep.clone());
    assert!((shallow_term - shallow[0].powf(-0.25)).abs() < 1e-12);
    assert!((deep_term - deep[0].powf(-0.25)).abs() < 1e-12);
    assert!((deep_term / shallow_term - 2.0).abs() < 1e-12);
}

#[test]
fn x_weight_cancellation_pins_the_zeroth_term() {
    let grid = Grid::standard(1, 32).unwrap();
    let times = geometric_times(0.5, 2.0, 8).unwrap();
    let u = SpaceTimeField::from_fn(&grid, times, |x, _, t| t.sqrt() * x.sin()).unwrap();
    let report = x_norm(&u, ALPHA, 1.0).unwrap();
    assert!((report.term("grad0_sup").unwrap() - 1.0).abs() < 1e-12);
    assert_eq!(report.terms().len(), 10);
    assert!(report.terms().values().all(|v| v.is_finite() && *v >= 0.0));
    let sum: f64 = report.terms().values().sum();
    assert_eq!(report.total(), sum);
}

#[test]
fn norms_are_homogeneous_and_subadditive() {
    let grid = Grid::standard(2, 16).unwrap();
    let times = geometric_times(0.5, 2.0f64.powf(0.25), 6).unwrap();
    let f = random_trajectory(&grid, times.clone(), 11);
    let g = random_trajectory(&grid, times.clone(), 22);
    let scaled = f.map_slices(|s| s.scale(-2.5)).unwrap();
    let sum = f.linear_combination(1.0, &g, 1.0).unwrap();

    for norm in [y_norm, x_norm] {
        let nf = norm(&f, ALPHA, 1.0).unwrap().total();
        let ng = norm(&g, ALPHA, 1.0).unwrap().total();
        let nscaled = norm(&scaled, ALPHA, 1.0).unwrap().total();
        let nsum = norm(&sum, ALPHA, 1.0).unwrap().total();
        assert!((nscaled - 2.5 * nf).abs() < 1e-9 * nf, "homogeneity: {nscaled} vs {}", 2.5 * nf);
        assert!(nsum <= nf + ng + 1e-9 * (nf + ng), "triangle: {nsum} vs {}", nf + ng);
    }
}

#[test]
fn sub_window_norm_does_not_exceed_full_window() {
    let grid = Grid::standard(1, 32).unwrap();
    let times = geometric_times(0.8, 2.0f64.powf(0.5), 10).unwrap();
    let f = random_trajectory(&grid, times.clone(), 33);
    let full = y_norm(&f, ALPHA, 1.0).unwrap().total();
    let t_cut = times[5];
    let restricted = f.restrict_to(t_cut).unwrap();
    let sub = y_norm(&restricted, ALPHA, t_cut).unwrap().total();
    assert!(sub <= full + 1e-12 * full, "sub-window {sub} vs full {full}");
}

#[test]
fn x_prime_extra_terms_are_controlled_by_the_norm() {
    let grid = Grid::standard(1, 32).unwrap();
    let times = geometric_times(0.5, 2.0f64.powf(0.25), 10).unwrap();
    for seed in [7u64, 19] {
        let u = random_trajectory(&grid, times.clone(), seed);
        let total = x_norm(&u, ALPHA, 1.0).unwrap().total();
        let extras = x_prime_extra_terms(&u, ALPHA, 1.0).unwrap();
        assert_eq!(extras.len(), 4);
        for (name, value) in extras {
            assert!(
                value <= 10.0 * total,
                "seed {seed}: extra term {name} = {value:.3e} vs total {total:.3e}"
            );
        }
    }
}

#[test]
fn degenerate_inputs_are_rejected() {
    let grid = Grid::standard(1, 32).unwrap();
    let short = SpaceTimeField::from_fn(&grid, vec![0.25, 0.5, 1.0], |x, _, t| t * x.sin()).unwrap();
    assert!(matches!(y_norm(&short, ALPHA, 2.0), Err(NormError::InsufficientData(_))));
    assert!(matches!(x_norm(&short, ALPHA, 2.0), Err(NormError::InsufficientData(_))));

    let times = geometric_times(0.5, 2.0, 6).unwrap();
    let ok = SpaceTimeField::from_fn(&grid, times, |x, _, t| t * x.sin()).unwrap();
    assert!(matches!(y_norm(&ok, 1.2, 1.0), Err(NormError::InvalidArgument(_))));
    // T smaller than the last slice time: slices must lie inside (0, T].
    assert!(matches!(x_norm(&ok, ALPHA, 0.4), Err(NormError::InvalidArgument(_))));
}

#[test]
fn x_report_serializes_every_term() {
    let grid = Grid::standard(1, 32).unwrap();
    let times = geometric_times(0.5, 2.0, 6).unwrap();
    let u = SpaceTimeField::from_fn(&grid, times, |x, _, t| t.sqrt() * (2.0 * x).cos()).unwrap();
    let report = x_norm(&u, ALPHA, 1.0).unwrap();
    let json: serde_json::Value = serde_json::from_str(&report.to_json()).unwrap();
    for key in [
        "grad0_sup",
        "grad1_sup",
        "grad2_sup",
        "grad3_sup",
        "grad4_sup",
        "grad4_space_holder",
        "dt_sup",
        "dt_space_holder",
        "grad4_time_holder",
        "dt_time_holder",
    ] {
        assert!(json["terms"][key].is_number(), "missing term {key}");
    }
    assert_eq!(json["time_grid"].as_array().unwrap().len(), 6);
}
