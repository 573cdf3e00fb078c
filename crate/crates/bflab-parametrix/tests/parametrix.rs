//! End-to-end checks of the parametrix pipeline: frozen-kernel gluing,
//! defect structure, Neumann series, and the assembled heat kernel against
//! the spectral semigroup oracle.

use nalgebra::DMatrix;

use bflab_kernel::{decay_fit, flat_torus_kernel, reference_kernel, KernelProfile, MetricSpec};
use bflab_parametrix::{
    assemble_kernel, build_parametrix, defect, measured_singularity, neumann_series,
    quadrature_nodes, resolution_floor, resolved_time_grid, spacetime_convolve, validate_assembly,
    DefectGroup, SpaceTimeTable, TimeKernel, MASS_TOL, PDE_TOL, ROW_L1_TOL,
};
use bflab_spectral::{Grid, SpectralField};

/// The standard perturbation used throughout: c = 1 + ε(cos x + ½ sin 2x),
/// which keeps c > 0 for ε = 0.1 while exercising two harmonics.
fn perturbed_metric(grid: &Grid, epsilon: f64) -> MetricSpec {
    let profile = SpectralField::from_fn(grid.clone(), |x, _| x.cos() + 0.5 * (2.0 * x).sin());
    MetricSpec::conformal(profile, epsilon).unwrap()
}

/// Least-squares slope of y against x.
fn fit_slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    sxy / sxx
}

/// max over rows of ∫|a − b|dV / ∫|b|dV.
fn row_l1_gap(a: &DMatrix<f64>, b: &DMatrix<f64>, w: &[f64]) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..a.nrows() {
        let mut num = 0.0;
        let mut den = 0.0;
        for j in 0..a.ncols() {
            num += (a[(i, j)] - b[(i, j)]).abs() * w[j];
            den += b[(i, j)].abs() * w[j];
        }
        worst = worst.max(num / den);
    }
    worst
}

#[test]
fn flat_parametrix_reproduces_the_flat_kernel() {
    // A long interval so the chart cutoffs sit far outside the kernel
    // support: the glued parametrix must then agree with the translation-
    // invariant kernel to table accuracy.
    let grid = Grid::new(1, 512, 64.0).unwrap();
    let times = [2e-4, 1e-3];
    let metric = MetricSpec::flat(grid.clone());
    let z = build_parametrix(&metric, &grid, &times, 4).unwrap();
    let flat = flat_torus_kernel(&grid, &times).unwrap();
    for (idx, &t) in times.iter().enumerate() {
        let gap = (z.data().slice(idx) - flat.dense_slice(idx)).amax();
        assert!(gap < 1e-9, "t={t}: flat parametrix differs from the flat kernel by {gap:.3e}");
    }
}

#[test]
fn parametrix_reproduces_initial_data_at_small_times() {
    let grid = Grid::standard(1, 128).unwrap();
    let metric = perturbed_metric(&grid, 0.1);
    let floor = resolution_floor(&grid);
    let z = build_parametrix(&metric, &grid, &[floor, 2.0 * floor], 3).unwrap();
    let u = SpectralField::from_fn(grid.clone(), |x, _| x.cos() + 0.5 * (2.0 * x).sin());
    // h⁴ rather than the storage floor 4h⁴: the trace is evaluated from the
    // analytic profiles, and the shorter time keeps the cutoff tails of the
    // kernel an extra factor √2 inside the charts.
    let t = grid.spacing().powi(4);
    let err = z.initial_trace_error(&u, t).unwrap();
    assert!(err < 1e-3, "sup|∫Z(x,y;{t:.2e})u(y)dV − u(x)| = {err:.3e}");
}

#[test]
fn parametrix_error_against_the_oracle_shrinks_like_the_quarter_power() {
    let grid = Grid::standard(1, 128).unwrap();
    let metric = perturbed_metric(&grid, 0.1);
    // Early times: late enough that the spectral oracle is converged
    // (Nyquist damping e^{−a k⁴t} ≈ e^{−29} at the first point), early
    // enough that the cutoff tails stay ≲3% of the freezing error and do
    // not pollute the slope.
    let times = [3e-6, 6e-6, 1.2e-5, 2.4e-5];
    let z = build_parametrix(&metric, &grid, &times, 3).unwrap();
    let oracle = reference_kernel(&metric, &grid, &times).unwrap();
    let w = oracle.weights().to_vec();
    let pts: Vec<(f64, f64)> = times
        .iter()
        .enumerate()
        .map(|(idx, &t)| {
            let gap = row_l1_gap(z.data().slice(idx), &oracle.dense_slice(idx), &w);
            assert!(gap < 0.05, "t={t}: parametrix row-L¹ gap {gap:.3e} out of scale");
            (t.ln(), gap.ln())
        })
        .collect();
    let slope = fit_slope(&pts);
    assert!(
        (slope - 0.25).abs() < 0.05,
        "row-L¹ error slope {slope:.3} ≠ 1/4 (gaps {:?})",
        pts.iter().map(|p| p.1.exp()).collect::<Vec<_>>()
    );
}

#[test]
fn parametrix_rows_carry_the_four_thirds_tail() {
    let grid = Grid::standard(1, 192).unwrap();
    let metric = MetricSpec::flat(grid.clone());
    let t = 1e-4;
    let z = build_parametrix(&metric, &grid, &[t], 3).unwrap();
    let slice = z.data().slice(0);
    // Radii stop at 2.39 < 2.51, where the partition ramp toward the next
    // chart begins; below that every chart sees the same minimal-branch
    // displacement and the row is the pure frozen profile.
    let radii: Vec<f64> = (0..=73).map(|j| grid.coord(j)).collect();
    let values: Vec<f64> = (0..=73).map(|j| slice[(0, j)]).collect();
    let profile = KernelProfile::new(1, 0, t, radii, values).unwrap();
    let fit = decay_fit(&profile).unwrap();
    assert!(fit.used_peaks_only, "tail fit fell back to raw points ({} used)", fit.points_used);
    assert!(
        (fit.exponent_est - 4.0 / 3.0).abs() < 0.05,
        "stretched-exponential exponent {:.4} ≠ 4/3",
        fit.exponent_est
    );
    assert!(
        (fit.delta_est - 0.2362).abs() < 0.01,
        "decay rate {:.4} ≠ 0.2362",
        fit.delta_est
    );
}

#[test]
fn flat_defect_is_pure_cutoff_and_small() {
    // Wide charts on a long interval: the freezing and lower-order groups
    // vanish identically for a flat metric, and for t ≤ 0.01 the kernel
    // tails have not yet reached the ψ-transition bands, so even the cutoff
    // group is far below the parametrix's own derivative scale.
    let grid = Grid::new(1, 128, 96.0).unwrap();
    let metric = MetricSpec::flat(grid.clone());
    let times = [2e-3, 5e-3, 1e-2];
    let z = build_parametrix(&metric, &grid, &times, 4).unwrap();
    let k = defect(&z, &metric).unwrap();
    for (idx, &t) in times.iter().enumerate() {
        assert_eq!(k.group_sup(DefectGroup::Freezing, idx), 0.0, "freezing group at t={t}");
        assert_eq!(k.group_sup(DefectGroup::LowerOrder, idx), 0.0, "lower-order group at t={t}");
        let cutoff = k.total().sup_norm(idx);
        let scale = z.derivative_slice(4, t).unwrap().amax();
        assert!(
            cutoff <= 1e-6 * scale,
            "t={t}: cutoff defect {cutoff:.3e} above 1e-6·sup|∂⁴Z| = {:.3e}",
            1e-6 * scale
        );
    }
}

#[test]
fn perturbed_defect_splits_into_three_active_groups() {
    let grid = Grid::standard(1, 64).unwrap();
    let metric = perturbed_metric(&grid, 0.1);
    let times = resolved_time_grid(&grid, 0.1).unwrap();
    let z = build_parametrix(&metric, &grid, &times, 4).unwrap();
    let k = defect(&z, &metric).unwrap();
    for group in [DefectGroup::Freezing, DefectGroup::LowerOrder, DefectGroup::Cutoff] {
        assert!(
            k.group_sup(group, 0) > 0.0,
            "{group:?} group vanished for a perturbed metric"
        );
    }
    // The groups are a partition of the defect, not three separate models.
    let t = times[5];
    let groups = k.groups_at(t).unwrap();
    let total = k.total().slice_at(t).unwrap();
    let recomposed = &groups[0] + &groups[1] + &groups[2];
    let gap = (&recomposed - &total).amax();
    assert!(gap <= 1e-12 * total.amax(), "group split misses the total by {gap:.3e}");
    // Singular but integrable: the early sup norms dwarf the late ones.
    let first = k.total().sup_norm(0);
    let last = k.total().sup_norm(times.len() - 1);
    assert!(first > 10.0 * last, "defect sup norms flat in t: {first:.3e} vs {last:.3e}");
}

#[test]
fn flat_convolution_follows_the_semigroup() {
    let grid = Grid::standard(1, 128).unwrap();
    let floor = resolution_floor(&grid);
    let horizon = 0.1;
    // Denser ladder than storage needs (ratio 2^{1/8}) so that interpolation
    // at quadrature nodes stays well below the 1e-6 comparison budget.
    let ratio = 2f64.powf(0.125);
    let mut times = Vec::new();
    let mut t = horizon;
    while t >= floor {
        times.push(t);
        t /= ratio;
    }
    times.reverse();
    let flat = flat_torus_kernel(&grid, &times).unwrap();
    let slices: Vec<DMatrix<f64>> = (0..times.len()).map(|i| flat.dense_slice(i)).collect();
    let table =
        SpaceTimeTable::new(grid.clone(), times.clone(), flat.weights().to_vec(), slices, 0.25)
            .unwrap();

    // Chapman–Kolmogorov at every quadrature node: b(t−s)∘b(s) = b(t).
    // (The time-integrated identity is checked below; pointwise products
    // satisfy no such relation, only the composed kernels do.)
    let nodes = quadrature_nodes(horizon, table.floor(), table.floor(), 6);
    let mut comp_times: Vec<f64> = nodes.iter().flat_map(|&(s, _)| [s, horizon - s]).collect();
    comp_times.push(horizon);
    comp_times.sort_by(f64::total_cmp);
    comp_times.dedup_by(|a, b| (*a - *b).abs() < 1e-13 * *b);
    let comp = flat_torus_kernel(&grid, &comp_times).unwrap();
    let locate = |want: f64| {
        comp.times()
            .iter()
            .position(|&tt| (tt - want).abs() <= 1e-12 * want)
            .expect("node time missing from the composition table")
    };
    let target = comp.dense_slice(locate(horizon));
    let scale = target.amax();
    let mut worst: f64 = 0.0;
    for &(s, _) in &nodes {
        let composed = comp.compose(locate(horizon - s), locate(s)).unwrap();
        worst = worst.max((&composed - &target).amax());
    }
    assert!(
        worst <= 1e-8 * scale,
        "node-level semigroup composition off by {:.3e} relative",
        worst / scale
    );

    // The convolution table then integrates the constant slice: A∗A = t·A.
    let conv = spacetime_convolve(&table, &table).unwrap();
    for idx in [times.len() - 9, times.len() - 1] {
        let t_out = times[idx];
        let expected = table.slice(idx) * t_out;
        let rel = (conv.slice(idx) - &expected).amax() / expected.amax();
        assert!(rel <= 1e-6, "t={t_out}: A∗A deviates from t·A by {rel:.3e} relative");
    }
}

#[test]
fn flat_neumann_series_and_assembly_short_circuit() {
    let grid = Grid::new(1, 128, 96.0).unwrap();
    let metric = MetricSpec::flat(grid.clone());
    // Both times keep the kernel tails short of the ψ-transition bands, so
    // the defect is identically zero and the series must stop at K₁.
    let times = [2e-3, 5e-3];
    let z = build_parametrix(&metric, &grid, &times, 4).unwrap();
    let k = defect(&z, &metric).unwrap();
    assert_eq!(k.total().sup_norm_max(), 0.0, "flat defect not exactly zero");

    let series = neumann_series(&k, 1e-6).unwrap();
    assert_eq!(series.len(), 1, "flat series kept convolving");
    assert_eq!(series.psi().sup_norm_max(), 0.0);
    assert_eq!(series.residual_weight(), 0.0);
    assert_eq!(series.residual_sup(), 0.0);

    let b = assemble_kernel(&z, &series).unwrap();
    let flat = flat_torus_kernel(&grid, &times).unwrap();
    for (idx, &t) in times.iter().enumerate() {
        let vs_z = (b.dense_slice(idx) - z.data().slice(idx)).amax();
        assert_eq!(vs_z, 0.0, "t={t}: assembly added a correction to a zero series");
        let vs_flat = (b.dense_slice(idx) - flat.dense_slice(idx)).amax();
        assert!(vs_flat < 1e-9, "t={t}: assembled flat kernel off by {vs_flat:.3e}");
    }
    assert!(b.mass_defect() < 1e-9, "flat mass defect {:.3e}", b.mass_defect());
    assert!(b.symmetry_defect() < 1e-12, "flat asymmetry {:.3e}", b.symmetry_defect());
}

#[test]
fn neumann_series_contracts_super_geometrically() {
    let grid = Grid::standard(1, 64).unwrap();
    let metric = perturbed_metric(&grid, 0.1);
    let times = resolved_time_grid(&grid, 0.1).unwrap();
    let z = build_parametrix(&metric, &grid, &times, 4).unwrap();
    let k = defect(&z, &metric).unwrap();
    let tolerance = 1e-6;
    let series = neumann_series(&k, tolerance).unwrap();
    let records = series.records();
    assert!(records.len() >= 3, "series converged after {} iterates", records.len());

    let sups: Vec<f64> = records.iter().map(|r| r.sup_norm).collect();
    let m0_sup = (1..sups.len()).rposition(|i| sups[i] >= sups[i - 1]).map_or(1, |i| i + 2);
    assert!(
        m0_sup <= 8,
        "sup norms only decrease from m₀ = {m0_sup} onward: {sups:?}"
    );

    // Super-geometric decay: the contraction ratios themselves shrink from
    // some m₀ ≤ 8 onward (the factorial gain beats the fixed T^{1/4}).
    let ratios: Vec<f64> = sups.windows(2).map(|w| w[1] / w[0]).collect();
    let m0_ratio = (1..ratios.len())
        .rposition(|i| ratios[i] >= ratios[i - 1])
        .map_or(2, |i| i + 3);
    assert!(
        m0_ratio <= 8,
        "ratios only decrease from m₀ = {m0_ratio} onward: {ratios:?}"
    );

    assert!(
        series.residual_weight() < 10.0 * tolerance,
        "integral-equation residual weight {:.3e}",
        series.residual_weight()
    );
}

#[test]
fn assembled_kernel_matches_the_semigroup_oracle() {
    // The production geometry: fine enough that the ψ-cutoff tails cost
    // less than the 1e-6 mass budget at every stored time, coarse enough
    // that the dense oracle and the convolution quadrature stay affordable.
    let grid = Grid::standard(1, 192).unwrap();
    let metric = perturbed_metric(&grid, 0.1);
    let horizon = 0.1;
    let times = resolved_time_grid(&grid, horizon).unwrap();
    let z = build_parametrix(&metric, &grid, &times, 3).unwrap();
    let k = defect(&z, &metric).unwrap();

    // One order gained over ∂⁴Z ~ t^{−5/4}: the defect is t^{−1}-singular.
    let order = measured_singularity(&k);
    assert!((order + 1.0).abs() < 0.1, "defect singularity order {order:.3}");

    // Mean-versus-sup separation: row integrals stay bounded (the defect's
    // signed column structure cancels) while the sup norm blows up like 1/t.
    let early_sup = k.total().sup_norm(0);
    let early_mean: f64 = (0..8).map(|i| k.row_integral(i)).fold(0.0, f64::max);
    assert!(
        early_mean <= 1e-2 * early_sup,
        "defect row integrals {early_mean:.3e} not an order below sup {early_sup:.3e}"
    );

    let series = neumann_series(&k, 1e-6).unwrap();
    let records = series.records();
    assert!(records.len() >= 3, "series stopped after {} iterates", records.len());
    // Each convolution with the t^{−1} defect gains a quarter power.
    for (idx, expected, tol) in [(0, -1.0, 0.1), (1, -0.75, 0.1), (2, -0.5, 0.15)] {
        let got = records[idx].fit_exponent;
        assert!(
            (got - expected).abs() < tol,
            "iterate {} singularity {got:.3} ≠ {expected}",
            idx + 1
        );
    }

    let b = assemble_kernel(&z, &series).unwrap();

    // Validation window: from 8× the resolution floor (below which the
    // quadrature slivers dominate) out to the horizon, hitting t = 0.05.
    let floor = resolution_floor(&grid);
    let idx_early = times.iter().position(|&t| t >= 8.0 * floor).unwrap();
    let idx_mid = times.iter().position(|&t| t >= 1e-3).unwrap();
    let idx_near = times
        .iter()
        .enumerate()
        .min_by(|a, b| (a.1 - 0.05).abs().total_cmp(&(b.1 - 0.05).abs()))
        .unwrap()
        .0;
    let picks = [idx_early, idx_mid, idx_near, times.len() - 1];
    let validation_times: Vec<f64> = picks.iter().map(|&i| times[i]).collect();

    let oracle = reference_kernel(&metric, &grid, &validation_times).unwrap();
    let report = validate_assembly(&z, &series, &oracle, &validation_times).unwrap();
    for row in report.rows() {
        assert!(
            row.row_l1_error <= ROW_L1_TOL,
            "t={:.3e}: row-L¹ error {:.3e}",
            row.t,
            row.row_l1_error
        );
        assert!(
            row.mass_error <= MASS_TOL,
            "t={:.3e}: mass error {:.3e}",
            row.t,
            row.mass_error
        );
        assert!(
            row.pde_residual <= PDE_TOL,
            "t={:.3e}: PDE residual {:.3e}",
            row.t,
            row.pde_residual
        );
    }
    assert!(report.passed());

    // The true kernel is symmetric; the parametrix is not. The Neumann
    // correction must restore symmetry to within 1e-5 of the kernel scale
    // across the validated window.
    for &idx in &picks {
        let slice = b.dense_slice(idx);
        let asym = (&slice - slice.transpose()).amax() / slice.amax();
        assert!(
            asym <= 1e-5,
            "t={:.3e}: assembled kernel asymmetry {asym:.3e}",
            times[idx]
        );
    }
}
