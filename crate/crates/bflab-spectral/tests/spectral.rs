use bflab_spectral::{
    geometric_times, holder_seminorm, Grid, SpectralField, C64, DEFAULT_TIME_RATIO,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn standard_grid(n: usize) -> Grid {
    Grid::standard(1, n).unwrap()
}

#[test]
fn derivative_of_sine_is_cosine() {
    let grid = standard_grid(64);
    let f = SpectralField::from_fn(grid.clone(), |x, _| x.sin());
    let df = f.derivative(&[1]).unwrap();
    for idx in 0..grid.len() {
        let [x, _] = grid.node(idx);
        assert!((df.value(idx) - x.cos()).abs() < 1e-12);
    }
}

#[test]
fn derivative_annihilates_constants() {
    let grid = standard_grid(32);
    let c = SpectralField::constant(grid, 1.0);
    for k in 1..=5 {
        let d = c.derivative(&[k]).unwrap();
        assert!(d.sup_norm() < 1e-13, "order {k} left {}", d.sup_norm());
    }
}

// Oracle: centered finite differences of the analytic function at spacing h
// and h/2; the spectral value must sit within the Richardson-extrapolated
// error band (second-order shrinkage).
#[test]
fn second_derivative_matches_finite_difference_oracle() {
    let grid = standard_grid(128);
    let f = |x: f64| x.cos().exp();
    let field = SpectralField::from_fn(grid.clone(), |x, _| f(x));
    let d2 = field.derivative(&[2]).unwrap();

    let fd2 = |x: f64, h: f64| (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
    let h = 0.05;
    let mut err_h = 0.0f64;
    let mut err_h2 = 0.0f64;
    for idx in 0..grid.len() {
        let [x, _] = grid.node(idx);
        err_h = err_h.max((d2.value(idx) - fd2(x, h)).abs());
        err_h2 = err_h2.max((d2.value(idx) - fd2(x, 0.5 * h)).abs());
    }
    // O(h²) convergence of the oracle toward the spectral value.
    assert!(err_h < 4e-3, "err at h: {err_h}");
    assert!(err_h2 < 0.3 * err_h, "no quadratic shrinkage: {err_h} -> {err_h2}");
    assert!(err_h2 < 1e-3);
}

#[test]
fn derivative_is_linear() {
    let grid = standard_grid(64);
    let f = SpectralField::from_fn(grid.clone(), |x, _| (2.0 * x).sin() + 0.3 * x.cos());
    let g = SpectralField::from_fn(grid.clone(), |x, _| (3.0 * x).cos());
    let combo = f.scale(2.5).add(&g.scale(-1.25)).unwrap();
    let lhs = combo.derivative(&[3]).unwrap();
    let rhs = f
        .derivative(&[3])
        .unwrap()
        .scale(2.5)
        .add(&g.derivative(&[3]).unwrap().scale(-1.25))
        .unwrap();
    let diff = lhs.sub(&rhs).unwrap().sup_norm();
    assert!(diff < 1e-11, "linearity defect {diff}");
}

#[test]
fn round_trip_is_identity() {
    let grid = Grid::standard(2, 32).unwrap();
    let f = SpectralField::from_fn(grid.clone(), |x, y| (x.sin() + 0.5 * (2.0 * y).cos()).exp());
    let back = SpectralField::from_coeffs(grid, f.coeffs().to_vec()).unwrap();
    let scale = f.sup_norm();
    for (a, b) in f.samples().iter().zip(back.samples()) {
        assert!((a - b).abs() <= 1e-12 * scale);
    }
}

#[test]
fn holder_seminorm_of_constant_vanishes() {
    let grid = standard_grid(64);
    let c = SpectralField::constant(grid, 4.2);
    assert_eq!(holder_seminorm(&c, 0.5).unwrap(), 0.0);
}

// Oracle: the same dense pair scan on a refined grid; the kink field's
// seminorm must be stable under refinement.
#[test]
fn holder_seminorm_of_kink_field_is_refinement_stable() {
    let alpha = 0.5;
    let value = |n: usize| {
        let grid = standard_grid(n);
        let f = SpectralField::from_fn(grid, |x, _| x.sin().abs());
        holder_seminorm(&f, alpha).unwrap()
    };
    let coarse = value(128);
    let fine = value(256);
    assert!(
        (coarse - fine).abs() <= 0.05 * fine.abs(),
        "seminorm drifted: {coarse} vs {fine}"
    );
    assert!(fine.is_finite() && fine > 0.0);
}

#[test]
fn holder_seminorm_obeys_mean_value_bound() {
    let grid = standard_grid(128);
    let f = SpectralField::from_fn(grid.clone(), |x, _| (2.0 * x).sin());
    let alpha = 0.3;
    let cap = grid.period() / 4.0;
    let sup_slope = 2.0; // sup |f'| for sin(2x)
    let bound = sup_slope * cap.powf(1.0 - alpha);
    let sn = holder_seminorm(&f, alpha).unwrap();
    assert!(sn <= bound * (1.0 + 1e-12), "{sn} > {bound}");
}

#[test]
fn holder_seminorm_is_homogeneous_and_shift_invariant() {
    let grid = standard_grid(64);
    let f = SpectralField::from_fn(grid, |x, _| x.sin() + 0.2 * (3.0 * x).cos());
    let base = holder_seminorm(&f, 0.4).unwrap();
    let scaled = holder_seminorm(&f.scale(-3.5), 0.4).unwrap();
    assert!((scaled - 3.5 * base).abs() < 1e-12 * base.max(1.0));
    let shifted = holder_seminorm(&f.add_scalar(7.0), 0.4).unwrap();
    assert!((shifted - base).abs() < 1e-12 * base.max(1.0));
}

#[test]
fn holder_seminorms_interpolate_across_alpha() {
    let grid = standard_grid(64);
    let f = SpectralField::from_fn(grid.clone(), |x, _| (x.cos()).exp());
    let (a1, a2) = (0.3, 0.7);
    let s1 = holder_seminorm(&f, a1).unwrap();
    let s2 = holder_seminorm(&f, a2).unwrap();
    let cap = grid.period() / 4.0;
    assert!(s1 <= s2 * cap.powf(a2 - a1) * (1.0 + 1e-12));
}

#[test]
fn dealiased_product_with_zero_is_zero() {
    let grid = standard_grid(64);
    let f = SpectralField::from_fn(grid.clone(), |x, _| x.sin());
    let z = SpectralField::zeros(grid);
    let p = f.dealiased_product(&z).unwrap();
    assert_eq!(p.sup_norm(), 0.0);
}

#[test]
fn dealiased_product_reproduces_trig_identity() {
    let grid = standard_grid(64);
    let c = SpectralField::from_fn(grid.clone(), |x, _| x.cos());
    let p = c.dealiased_product(&c).unwrap();
    let expected = SpectralField::from_fn(grid, |x, _| 0.5 * (1.0 + (2.0 * x).cos()));
    let diff = p.sub(&expected).unwrap().sup_norm();
    assert!(diff < 1e-12, "trig identity defect {diff}");
}

fn random_band_limited(grid: &Grid, band: usize, rng: &mut ChaCha8Rng) -> SpectralField {
    let n = grid.points_per_axis();
    let mut coeffs = vec![C64::new(0.0, 0.0); grid.len()];
    for k in 1..=band {
        let amp = 1.0 / k as f64;
        let c = C64::new(rng.gen_range(-amp..amp), rng.gen_range(-amp..amp));
        coeffs[k] = c;
        coeffs[n - k] = c.conj();
    }
    SpectralField::from_coeffs(grid.clone(), coeffs).unwrap()
}

// Oracle: the same product formed on a 2x finer grid (alias-free there),
// compared inside the retained band.
#[test]
fn dealiased_product_matches_oversampled_oracle() {
    let n = 96usize.next_power_of_two(); // 128
    let grid = standard_grid(n);
    let fine = standard_grid(2 * n);
    let band = n / 3;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let f = random_band_limited(&grid, band, &mut rng);
    let g = random_band_limited(&grid, band, &mut rng);

    // Re-synthesize the identical modes on the fine grid.
    let embed = |coarse: &SpectralField| {
        let mut coeffs = vec![C64::new(0.0, 0.0); fine.len()];
        for k in 1..=band {
            coeffs[k] = coarse.coeffs()[k];
            coeffs[2 * n - k] = coarse.coeffs()[n - k];
        }
        SpectralField::from_coeffs(fine.clone(), coeffs).unwrap()
    };
    let exact = embed(&f).mul(&embed(&g)).unwrap();

    let dealiased = f.dealiased_product(&g).unwrap();
    let cut = n / 3;
    for k in 0..n {
        let sk = grid.signed_index(k);
        if sk.unsigned_abs() as usize > cut {
            continue;
        }
        let fine_idx = if sk >= 0 { sk as usize } else { 2 * n - sk.unsigned_abs() as usize };
        let diff = (dealiased.coeffs()[k] - exact.coeffs()[fine_idx]).norm();
        assert!(diff < 1e-10, "mode {sk}: defect {diff}");
    }
}

#[test]
fn dealiased_product_rejects_grid_mismatch() {
    let f = SpectralField::zeros(standard_grid(32));
    let g = SpectralField::zeros(standard_grid(64));
    assert!(f.dealiased_product(&g).is_err());
}

#[test]
fn geometric_time_grid_is_ascending_geometric() {
    let times = geometric_times(1.0, DEFAULT_TIME_RATIO, 9).unwrap();
    assert_eq!(times.len(), 9);
    assert!((times[8] - 1.0).abs() < 1e-15);
    for w in times.windows(2) {
        assert!((w[1] / w[0] - DEFAULT_TIME_RATIO).abs() < 1e-12);
    }
    // 9 slices at ratio 2^(1/4) span exactly one dyadic decade of 2.
    assert!((times[0] - 0.25).abs() < 1e-15);
}

#[test]
fn two_dimensional_mixed_derivative() {
    let grid = Grid::standard(2, 32).unwrap();
    let f = SpectralField::from_fn(grid.clone(), |x, y| x.sin() * (2.0 * y).cos());
    let dxy = f.derivative(&[1, 1]).unwrap();
    for idx in 0..grid.len() {
        let [x, y] = grid.node(idx);
        let expected = x.cos() * (-2.0) * (2.0 * y).sin();
        assert!((dxy.value(idx) - expected).abs() < 1e-11);
    }
}

#[test]
fn upsample_reproduces_band_limited_fields() {
    let grid = standard_grid(32);
    let f = SpectralField::from_fn(grid, |x, _| (3.0 * x).sin() + 0.5 * x.cos());
    let fine = f.upsample(8).unwrap();
    for idx in 0..fine.grid().len() {
        let [x, _] = fine.grid().node(idx);
        let expected = (3.0 * x).sin() + 0.5 * x.cos();
        assert!((fine.value(idx) - expected).abs() < 1e-12);
    }
}

// The checkerboard (pure Nyquist) must interpolate as cos(n/2 · x), not as a
// complex exponential.
#[test]
fn upsample_treats_nyquist_as_cosine() {
    let grid = standard_grid(32);
    let samples: Vec<f64> = (0..32).map(|j| if j % 2 == 0 { 1.0 } else { -1.0 }).collect();
    let f = SpectralField::from_samples(grid, samples).unwrap();
    let fine = f.upsample(4).unwrap();
    for idx in 0..fine.grid().len() {
        let [x, _] = fine.grid().node(idx);
        assert!((fine.value(idx) - (16.0 * x).cos()).abs() < 1e-12);
    }
}

#[test]
fn periodic_distance_wraps() {
    let grid = Grid::standard(1, 64).unwrap();
    let l = grid.period();
    assert!((grid.periodic_distance([0.1, 0.0], [l - 0.1, 0.0]) - 0.2).abs() < 1e-14);
    let g2 = Grid::standard(2, 32).unwrap();
    let d = g2.periodic_distance([0.0, 0.0], [l - 0.3, 0.4]);
    assert!((d - (0.3f64.powi(2) + 0.4f64.powi(2)).sqrt()).abs() < 1e-14);
}
