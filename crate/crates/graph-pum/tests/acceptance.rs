//! Acceptance suite: one test per criterion, each printing a PASS/FAIL/SKIP
//! line. Run with `cargo test --test acceptance -- --nocapture` to see the
//! lines; any violation fails the corresponding test.
//!
//! The Table-1 reproduction and the Minnesota variants need the Minnesota
//! road graph, which is not shipped with the repository. Point
//! `GRAPH_PUM_MINNESOTA` at the edge list / MatrixMarket file (or place it
//! at `data/minnesota.mtx` in the workspace root) to enable them; they are
//! reported as SKIP otherwise.

use std::path::PathBuf;
use std::time::Instant;

use graph_pum::bench::{median_rrmse_by_n, BenchConfig, SignalSpec};
use graph_pum::synthetic::{
    cycle_graph, grid_graph, path_graph, random_connected_graph, random_geometric_graph,
    random_signal,
};
use graph_pum::{
    build_cover, check_boundary_condition, eigendecompose, fill_distance_all, gbf_global,
    gbf_pum, greedy_j_center, node_norm, optimal_j_center_bruteforce, sample_permutation,
    shepard_partition, spline_kernel, verify_global_bound, verify_norm_estimates,
    verify_product_rule_gradient, verify_product_rule_laplacian, Graph, KernelSpec,
    LaplacianKind, MetricKind, PouKind, PumConfig, SampleSet, SolveRoute,
};
use nalgebra::DMatrix;

const SPLINE: KernelSpec = KernelSpec::VariationalSpline { eps: 0.001, s: 2.0 };

fn minnesota_path() -> Option<PathBuf> {
    if let Ok(p) = std::env::var("GRAPH_PUM_MINNESOTA") {
        let p = PathBuf::from(p);
        if p.exists() {
            return Some(p);
        }
    }
    let local = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../data/minnesota.mtx");
    local.exists().then_some(local)
}

fn load_minnesota() -> Option<Graph> {
    let path = minnesota_path()?;
    let g = graph_pum::io::load_graph(
        &path,
        LaplacianKind::Normalized,
        MetricKind::ShortestPathHops,
    )
    .expect("Minnesota file must parse");
    assert_eq!(g.n(), 2642, "Minnesota road graph has 2642 vertices");
    Some(g)
}

fn seeded_graph(seed: u64, n: usize) -> Graph {
    random_connected_graph(
        n,
        n / 3,
        seed % 2 == 0,
        seed,
        LaplacianKind::Standard,
        MetricKind::ShortestPathHops,
    )
}

#[test]
fn criterion_1_partition_of_unity_suite() {
    let t0 = Instant::now();
    let mut instances = 0usize;

    let mut graphs: Vec<Graph> = vec![
        path_graph(50, LaplacianKind::Standard),
        cycle_graph(40, LaplacianKind::Standard),
        grid_graph(10, 12, LaplacianKind::Normalized),
        random_geometric_graph(
            300,
            4.0,
            9,
            LaplacianKind::Normalized,
            MetricKind::ShortestPathHops,
        )
        .unwrap(),
    ];
    for seed in 0..200u64 {
        let n = 20 + (seed as usize * 7) % 181; // 20..=200
        graphs.push(seeded_graph(seed, n));
    }

    for (idx, g) in graphs.iter().enumerate() {
        let n = g.n();
        let w: Vec<usize> = sample_permutation(n, idx as u64)[..(n / 2).max(4)].to_vec();
        let j = 1 + idx % 6;
        let r = (idx % 4) as f64;
        let (centers, clustering) = greedy_j_center(g, &w, j.min(w.len()), w[0]).unwrap();
        let cover = build_cover(g, &centers, &clustering, r).unwrap();
        for kind in [PouKind::IndicatorSubdomain, PouKind::IndicatorCluster] {
            let pou = shepard_partition(&cover, kind).unwrap();
            instances += 1;

            let sum = pou.sum_signal();
            for v in 0..n {
                assert!(
                    (sum[v] - 1.0).abs() <= 1e-12,
                    "partition sum off at vertex {v}: {}",
                    sum[v]
                );
            }
            for jj in 0..cover.num_subdomains() {
                let phi = pou.to_full_signal(jj);
                for v in 0..n {
                    assert!(phi[v] >= 0.0, "negative weight");
                    if phi[v] != 0.0 {
                        assert!(cover.contains(jj, v), "support escapes the subdomain");
                    }
                }
            }
        }
    }

    let elapsed = t0.elapsed().as_secs_f64();
    assert!(elapsed < 10.0, "criterion 1 exceeded 10 s: {elapsed:.2} s");
    println!(
        "criterion 1 PASS: partition-of-unity identities on {instances} instances ({elapsed:.2} s)"
    );
}

#[test]
fn criterion_2_greedy_clustering_vs_oracle() {
    let t0 = Instant::now();
    for seed in 0..200u64 {
        let n = 8 + (seed as usize) % 13; // 8..=20
        let g = seeded_graph(seed.wrapping_mul(31).wrapping_add(5), n);
        let w: Vec<usize> = sample_permutation(n, seed)[..(n / 2).max(2)].to_vec();
        let j = 1 + (seed as usize) % 4.min(w.len());
        let (q, _) = greedy_j_center(&g, &w, j, w[0]).unwrap();
        let h_greedy = fill_distance_all(&g, &q.centers).unwrap();
        let all: Vec<usize> = (0..n).collect();
        let (_, h_opt) = optimal_j_center_bruteforce(&g, &all, j).unwrap();
        let h_w = fill_distance_all(&g, &w).unwrap();
        assert!(
            h_greedy <= 2.0 * h_opt + h_w + 1e-12,
            "seed {seed}: h_greedy = {h_greedy}, h_opt = {h_opt}, h_w = {h_w}"
        );
    }
    let elapsed = t0.elapsed().as_secs_f64();
    assert!(elapsed < 60.0, "criterion 2 exceeded 60 s: {elapsed:.2} s");
    println!(
        "criterion 2 PASS: greedy fill distance within 2*h_opt + h(W) on 200 instances ({elapsed:.2} s)"
    );
}

#[test]
fn criterion_3_product_rules_and_norm_estimates() {
    let t0 = Instant::now();
    let mut rule_instances = 0usize;
    let mut estimate_instances = 0usize;
    for seed in 0..1000u64 {
        let n = 8 + (seed as usize) % 33; // 8..=40
        let g = if seed % 3 == 0 {
            // free-diagonal Laplacian exercises the general product rule
            let base = seeded_graph(seed, n);
            let mut l = base.laplacian().clone();
            for i in 0..n {
                l[(i, i)] = ((seed as usize + i * 13) % 11) as f64 / 3.0 - 1.5;
            }
            Graph::from_laplacian(l, MetricKind::ShortestPathHops).unwrap()
        } else {
            seeded_graph(seed, n)
        };
        let x = random_signal(n, 10_000 + seed);
        let y = random_signal(n, 20_000 + seed);

        let grad_resid = verify_product_rule_gradient(&g, &x, &y).unwrap();
        let lap_resid = verify_product_rule_laplacian(&g, &x, &y).unwrap();
        assert!(grad_resid < 1e-12, "seed {seed}: gradient rule {grad_resid}");
        assert!(lap_resid < 1e-12, "seed {seed}: laplacian rule {lap_resid}");
        rule_instances += 1;

        for p in [1.0, 2.0, f64::INFINITY] {
            let report = verify_norm_estimates(&g, &x, &y, p).unwrap();
            assert!(
                report.holds(),
                "seed {seed} p {p}: gradient {} vs {}, laplacian {} vs {}",
                report.gradient_lhs,
                report.gradient_rhs,
                report.laplacian_lhs,
                report.laplacian_rhs
            );
            estimate_instances += 1;
        }
    }
    let elapsed = t0.elapsed().as_secs_f64();
    assert!(elapsed < 30.0, "criterion 3 exceeded 30 s: {elapsed:.2} s");
    println!(
        "criterion 3 PASS: product rules on {rule_instances} instances, norm estimates on {estimate_instances} ({elapsed:.2} s)"
    );
}

#[test]
fn criterion_4_global_error_bounds() {
    let t0 = Instant::now();
    let mut checked = 0usize;
    let mut control_violations = 0usize;

    let mut cases: Vec<(Graph, u64)> = vec![
        (grid_graph(8, 9, LaplacianKind::Normalized), 1),
        (path_graph(60, LaplacianKind::Standard), 2),
        (
            random_geometric_graph(
                250,
                4.5,
                3,
                LaplacianKind::Normalized,
                MetricKind::ShortestPathHops,
            )
            .unwrap(),
            3,
        ),
    ];
    for seed in 0..12u64 {
        cases.push((seeded_graph(900 + seed, 25 + (seed as usize % 20)), 50 + seed));
    }

    for (g, seed) in &cases {
        let n = g.n();
        let x = random_signal(n, *seed);
        let nodes = sample_permutation(n, *seed)[..(n / 2).max(6)].to_vec();
        let samples = SampleSet::from_signal(&x, nodes).unwrap();
        let j = 2 + (*seed as usize) % 3;
        let r = 1.0 + (*seed % 2) as f64;
        let config = PumConfig {
            pou: PouKind::IndicatorCluster,
            ..PumConfig::new(j, r, SPLINE)
        };
        let approx = gbf_pum(g, &samples, &config).unwrap();
        for p in [1.0, 2.0, f64::INFINITY] {
            let report = verify_global_bound(g, &x, &approx, p)
                .unwrap_or_else(|e| panic!("bound violated (seed {seed}, p {p}): {e}"));
            assert!(
                report.bc_satisfied,
                "cluster partition with r >= 1 must satisfy (BC)"
            );
            checked += 1;
        }

        // negative control: subdomain indicators break (BC) but the
        // zeroth-order bound still holds (verify_global_bound returns Ok
        // because only line (i)' is asserted without (BC))
        let control = PumConfig {
            pou: PouKind::IndicatorSubdomain,
            ..config
        };
        let approx = gbf_pum(g, &samples, &control).unwrap();
        let report = verify_global_bound(g, &x, &approx, 2.0)
            .expect("zeroth-order bound must hold for the negative control");
        if !report.bc_satisfied {
            control_violations += 1;
            assert!(
                !check_boundary_condition(g, &approx.cover, &approx.pou).all_satisfied()
            );
        }
    }
    assert!(
        control_violations > 0,
        "the negative control must actually violate (BC) somewhere"
    );

    let mut minnesota_note = "Minnesota: SKIP (external-data)".to_string();
    if let Some(g) = load_minnesota() {
        let spectrum = eigendecompose(&g).unwrap();
        let x = graph_pum::bandlimited_signal(&spectrum, 10).unwrap();
        let nodes = sample_permutation(g.n(), 7)[..528].to_vec();
        let samples = SampleSet::from_signal(&x, nodes).unwrap();
        let config = PumConfig {
            route: SolveRoute::Factorization,
            ..PumConfig::new(8, 8.0, SPLINE)
        };
        let approx = gbf_pum(&g, &samples, &config).unwrap();
        for p in [1.0, 2.0, f64::INFINITY] {
            verify_global_bound(&g, &x, &approx, p)
                .unwrap_or_else(|e| panic!("Minnesota bound violated (p {p}): {e}"));
            checked += 1;
        }
        minnesota_note = "Minnesota: checked".to_string();
    }

    let elapsed = t0.elapsed().as_secs_f64();
    println!(
        "criterion 4 PASS: {checked} bound checks with zero violations, negative control held; {minnesota_note} ({elapsed:.2} s)"
    );
}

#[test]
fn criterion_5_interpolation_exactness() {
    let mut worst_sample = 0.0f64;
    let mut worst_full = 0.0f64;
    let mut worst_degenerate = 0.0f64;

    for seed in 0..8u64 {
        let n = 30 + (seed as usize % 12);
        let g = seeded_graph(3000 + seed, n);
        let x = random_signal(n, 400 + seed);

        // gamma = 0 with the cluster blend reproduces every sample
        let nodes = sample_permutation(n, seed)[..(n / 2)].to_vec();
        let samples = SampleSet::from_signal(&x, nodes).unwrap();
        let config = PumConfig::new(3, 2.0, SPLINE);
        let approx = gbf_pum(&g, &samples, &config).unwrap();
        for (&w, &val) in samples.nodes.iter().zip(&samples.values) {
            worst_sample = worst_sample.max((approx.global[w] - val).abs());
        }

        // full sampling reproduces the whole signal
        let full = SampleSet::from_signal(&x, (0..n).collect()).unwrap();
        let approx = gbf_pum(&g, &full, &config).unwrap();
        for v in 0..n {
            worst_full = worst_full.max((approx.global[v] - x[v]).abs());
        }

        // one subdomain degenerates to the global fit
        let single = gbf_pum(&g, &samples, &PumConfig::new(1, 1.0, SPLINE)).unwrap();
        let global = gbf_global(&g, SPLINE, &samples, 0.0, SolveRoute::Spectral).unwrap();
        let diff = &single.global - &global;
        worst_degenerate = worst_degenerate.max(node_norm(&diff, f64::INFINITY).unwrap());
    }

    assert!(worst_sample < 1e-8, "sample reproduction error {worst_sample}");
    assert!(worst_full < 1e-8, "full-sampling reproduction error {worst_full}");
    assert!(
        worst_degenerate < 1e-10,
        "single-subdomain vs global gap {worst_degenerate}"
    );
    println!(
        "criterion 5 PASS: samples to {worst_sample:.2e}, full signal to {worst_full:.2e}, J=1 degeneracy to {worst_degenerate:.2e}"
    );
}

/// Scaling-and-squaring matrix exponential, independent of the spectral
/// kernel assembly it cross-checks.
fn expm_oracle(a: &DMatrix<f64>) -> DMatrix<f64> {
    let n = a.nrows();
    let norm1 = (0..n)
        .map(|j| a.column(j).iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max);
    let squarings = if norm1 > 0.5 {
        (norm1 / 0.5).log2().ceil() as u32
    } else {
        0
    };
    let b = a / 2.0f64.powi(squarings as i32);
    let mut term = DMatrix::<f64>::identity(n, n);
    let mut acc = DMatrix::<f64>::identity(n, n);
    for i in 1..60 {
        term = (&term * &b) / (i as f64);
        acc += &term;
        if term.abs().max() < 1e-19 {
            break;
        }
    }
    for _ in 0..squarings {
        acc = &acc * &acc;
    }
    acc
}

#[test]
fn criterion_6_kernel_numerics() {
    let mut worst_inverse = 0.0f64;
    let mut worst_expm = 0.0f64;
    let mut pd_checks = 0usize;

    for seed in 0..10u64 {
        let g = seeded_graph(5000 + seed, 20);
        let spectrum = eigendecompose(&g).unwrap();
        let eps = 0.01 + 0.1 * (seed as f64);

        // spline with s = 1 inverts the shifted Laplacian
        let k1 = spline_kernel(spectrum.clone(), eps, 1.0).unwrap();
        let full = k1.matrix(&(0..20).collect::<Vec<_>>()).unwrap().entries;
        let shifted = g.laplacian() + DMatrix::<f64>::identity(20, 20) * eps;
        worst_inverse = worst_inverse
            .max((&full * &shifted - DMatrix::<f64>::identity(20, 20)).abs().max());

        // diffusion kernel against the matrix-exponential oracle
        let t = 0.2 + 0.15 * (seed as f64);
        let kd = graph_pum::diffusion_kernel(spectrum.clone(), t);
        let m = kd.matrix(&(0..20).collect::<Vec<_>>()).unwrap().entries;
        let oracle = expm_oracle(&(g.laplacian() * -t));
        worst_expm = worst_expm.max((&m - &oracle).abs().max());

        // every assembled kernel matrix passes a positive definiteness check
        for kernel in [&k1, &kd] {
            for nodes in [vec![0, 3, 7, 12], (0..20).collect::<Vec<_>>(), vec![5]] {
                let sub = kernel.matrix(&nodes).unwrap().entries;
                assert!(
                    sub.cholesky().is_some(),
                    "kernel submatrix must be positive definite"
                );
                pd_checks += 1;
            }
        }
    }

    assert!(worst_inverse < 1e-8, "spline inverse residual {worst_inverse}");
    assert!(worst_expm < 1e-8, "diffusion vs expm residual {worst_expm}");
    println!(
        "criterion 6 PASS: spline inverse to {worst_inverse:.2e}, diffusion vs expm to {worst_expm:.2e}, {pd_checks} positive definite checks"
    );
}

#[test]
fn criterion_7_table1_trend_minnesota() {
    let Some(g) = load_minnesota() else {
        println!(
            "criterion 7 SKIP (external-data): Minnesota edge list not found; set GRAPH_PUM_MINNESOTA or place data/minnesota.mtx"
        );
        return;
    };
    let t0 = Instant::now();

    // synthesize the bandlimited test signal once (untimed scaffolding)
    let spectrum = eigendecompose(&g).unwrap();
    let x = graph_pum::bandlimited_signal(&spectrum, 10).unwrap();

    let grid = vec![132, 264, 528, 1056, 2112];
    let seeds: Vec<u64> = (0..10).collect();
    let run = |r: f64| {
        let config = BenchConfig {
            j: 8,
            r,
            pou: PouKind::IndicatorCluster,
            kernel: SPLINE,
            gamma: 0.0,
            route: SolveRoute::Factorization,
            grid: grid.clone(),
            seeds: seeds.clone(),
            signal: SignalSpec::External(x.clone()),
            baseline: false,
        };
        graph_pum::run_benchmark(&g, &config).unwrap()
    };
    let medians_r8 = median_rrmse_by_n(&run(8.0));
    let medians_r12 = median_rrmse_by_n(&run(12.0));

    for pair in medians_r8.windows(2) {
        assert!(
            pair[1].1 < pair[0].1,
            "r=8 median RRMSE not strictly decreasing: {pair:?}"
        );
    }
    for pair in medians_r12.windows(2) {
        assert!(
            pair[1].1 < pair[0].1,
            "r=12 median RRMSE not strictly decreasing: {pair:?}"
        );
    }
    for (a, b) in medians_r8.iter().zip(&medians_r12) {
        assert!(
            b.1 <= a.1,
            "larger overlap must not be less accurate: N={} r8={} r12={}",
            a.0,
            a.1,
            b.1
        );
    }
    let last = medians_r8.last().unwrap();
    assert_eq!(last.0, 2112);
    assert!(
        last.1 <= 1e-4,
        "median RRMSE at N=2112, r=8 is {} (must be <= 1e-4)",
        last.1
    );

    let elapsed = t0.elapsed().as_secs_f64();
    assert!(elapsed < 300.0, "criterion 7 exceeded 5 min: {elapsed:.1} s");
    println!(
        "criterion 7 PASS: medians r=8 {:?}, r=12 {:?} ({elapsed:.1} s)",
        medians_r8, medians_r12
    );
}

#[test]
fn criterion_8_pum_beats_global_at_large_n() {
    let (g, source) = match load_minnesota() {
        Some(g) => (g, "Minnesota"),
        None => (
            random_geometric_graph(
                2642,
                4.0,
                7,
                LaplacianKind::Normalized,
                MetricKind::ShortestPathHops,
            )
            .unwrap(),
            "synthetic 2642-node geometric graph",
        ),
    };
    assert_eq!(g.n(), 2642);

    let spectrum = eigendecompose(&g).unwrap();
    let x = graph_pum::bandlimited_signal(&spectrum, 10).unwrap();
    drop(spectrum);

    let config = BenchConfig {
        j: 8,
        r: 8.0,
        pou: PouKind::IndicatorCluster,
        kernel: SPLINE,
        gamma: 0.0,
        route: SolveRoute::Factorization,
        grid: vec![2112],
        seeds: vec![7],
        signal: SignalSpec::External(x),
        baseline: true,
    };
    let rows = graph_pum::run_benchmark(&g, &config).unwrap();
    let row = &rows[0];
    let global = row.global_seconds.expect("baseline requested");
    assert!(
        row.pum_seconds < global,
        "PUM ({:.3} s) must beat global GBF ({:.3} s) at N = 2112",
        row.pum_seconds,
        global
    );
    println!(
        "criterion 8 PASS: on {source}, PUM {:.3} s < global {:.3} s at N = 2112 (rrmse {:.3e} vs {:.3e})",
        row.pum_seconds,
        global,
        row.rrmse,
        row.global_rrmse.unwrap()
    );
}
