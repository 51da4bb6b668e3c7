//! Experiment harness for partition-of-unity graph signal approximation:
//! cover export, single interpolation runs, the analysis verification
//! suite, and seeded benchmark sweeps.

use std::collections::HashMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use graph_pum::bench::{median_rrmse_by_n, BenchConfig, SignalSpec};
use graph_pum::{
    bandlimited_signal, build_cover, check_boundary_condition, eigendecompose, gbf_global,
    gbf_pum, greedy_j_center, node_norm, optimal_j_center_bruteforce, rrmse, sample_permutation,
    shepard_partition, verify_global_bound, verify_norm_estimates, verify_product_rule_gradient,
    verify_product_rule_laplacian, fill_distance_all, Graph, KernelSpec, LaplacianKind,
    MetricKind, PouKind, PumConfig, SampleSet, Signal, SolveRoute,
};

#[derive(Parser)]
#[command(
    name = "graph-pum",
    version,
    about = "Partition-of-unity kernel interpolation on graphs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Cluster the graph, augment into overlapping subdomains, emit the
    /// cover as CSV (vertex, cluster, subdomain bitmask).
    Partition(PartitionArgs),
    /// Run one GBF-PUM approximation and emit vertex,true,approx,abs_error.
    Interpolate(InterpolateArgs),
    /// Run the numerical verification suite on synthetic fixtures and emit
    /// one JSON line per check.
    Verify(VerifyArgs),
    /// Seeded sampling-sweep benchmark with optional global-GBF baseline.
    Bench(BenchArgs),
}

#[derive(Args, Clone)]
struct GraphArgs {
    /// Graph file: edge list (`i i' weight`, 1-based) or MatrixMarket .mtx
    #[arg(long)]
    graph: Option<PathBuf>,
    /// Laplacian kind: standard | normalized | negadj
    #[arg(long)]
    laplacian: Option<String>,
    /// Metric: hops | weighted
    #[arg(long)]
    metric: Option<String>,
    /// Optional key=value config file; explicit flags win
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct PartitionArgs {
    #[command(flatten)]
    graph: GraphArgs,
    /// Number of subdomains
    #[arg(long)]
    j: Option<usize>,
    /// Augmentation radius
    #[arg(long)]
    r: Option<f64>,
    /// First center (1-based label); defaults to the first sampling node
    #[arg(long)]
    start: Option<usize>,
    /// Restrict centers to a random sampling set of this size
    #[arg(long)]
    n: Option<usize>,
    /// Seed for the sampling sequence
    #[arg(long)]
    seed: Option<u64>,
    /// Output path (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct InterpolateArgs {
    #[command(flatten)]
    graph: GraphArgs,
    /// Kernel family: spline | diffusion
    #[arg(long)]
    kernel: Option<String>,
    /// Spline shift epsilon
    #[arg(long)]
    eps: Option<f64>,
    /// Spline order s
    #[arg(long)]
    s: Option<f64>,
    /// Diffusion time t
    #[arg(long)]
    t: Option<f64>,
    #[arg(long)]
    j: Option<usize>,
    #[arg(long)]
    r: Option<f64>,
    /// Number of samples
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    gamma: Option<f64>,
    /// Partition of unity: cluster | subdomain
    #[arg(long)]
    pou: Option<String>,
    /// Kernel assembly: spectral | factor
    #[arg(long)]
    route: Option<String>,
    /// Bandlimited test-signal width (eigenvector count)
    #[arg(long)]
    bandlimit: Option<usize>,
    /// External signal CSV (vertex,value); overrides --bandlimit
    #[arg(long)]
    signal: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    #[command(flatten)]
    graph: GraphArgs,
    #[arg(long)]
    j: Option<usize>,
    #[arg(long)]
    r: Option<f64>,
    /// Comma-separated ascending sample counts
    #[arg(long)]
    grid: Option<String>,
    /// Number of seeds (base..base+count)
    #[arg(long)]
    seeds: Option<u64>,
    /// First seed
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    kernel: Option<String>,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    s: Option<f64>,
    #[arg(long)]
    t: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    pou: Option<String>,
    #[arg(long)]
    route: Option<String>,
    #[arg(long)]
    bandlimit: Option<usize>,
    #[arg(long)]
    signal: Option<PathBuf>,
    /// Also run and time the global GBF baseline per row
    #[arg(long)]
    baseline: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// key=value config file; blank lines and `#` comments allowed.
fn read_config(path: Option<&Path>) -> Result<HashMap<String, String>> {
    let mut map = HashMap::new();
    if let Some(path) = path {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        for raw in text.lines() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .with_context(|| format!("config line without `=`: {line}"))?;
            map.insert(key.trim().to_string(), value.trim().to_string());
        }
    }
    Ok(map)
}

fn resolve<T: std::str::FromStr>(
    flag: Option<T>,
    config: &HashMap<String, String>,
    key: &str,
    default: T,
) -> Result<T> {
    if let Some(v) = flag {
        return Ok(v);
    }
    if let Some(raw) = config.get(key) {
        return raw
            .parse::<T>()
            .map_err(|_| anyhow::anyhow!("bad config value for {key}: {raw}"));
    }
    Ok(default)
}

fn resolve_opt<T: std::str::FromStr>(
    flag: Option<T>,
    config: &HashMap<String, String>,
    key: &str,
) -> Result<Option<T>> {
    if let Some(v) = flag {
        return Ok(Some(v));
    }
    match config.get(key) {
        Some(raw) => raw
            .parse::<T>()
            .map(Some)
            .map_err(|_| anyhow::anyhow!("bad config value for {key}: {raw}")),
        None => Ok(None),
    }
}

fn parse_laplacian(name: &str) -> Result<LaplacianKind> {
    match name {
        "standard" => Ok(LaplacianKind::Standard),
        "normalized" => Ok(LaplacianKind::Normalized),
        "negadj" => Ok(LaplacianKind::NegativeAdjacency),
        other => bail!("unknown laplacian kind: {other}"),
    }
}

fn parse_metric(name: &str) -> Result<MetricKind> {
    match name {
        "hops" => Ok(MetricKind::ShortestPathHops),
        "weighted" => Ok(MetricKind::ShortestPathWeighted),
        other => bail!("unknown metric: {other}"),
    }
}

fn parse_pou(name: &str) -> Result<PouKind> {
    match name {
        "cluster" => Ok(PouKind::IndicatorCluster),
        "subdomain" => Ok(PouKind::IndicatorSubdomain),
        other => bail!("unknown partition kind: {other}"),
    }
}

fn parse_route(name: &str) -> Result<SolveRoute> {
    match name {
        "spectral" => Ok(SolveRoute::Spectral),
        "factor" => Ok(SolveRoute::Factorization),
        other => bail!("unknown solve route: {other}"),
    }
}

fn load_graph(args: &GraphArgs, config: &HashMap<String, String>) -> Result<Graph> {
    let path = match (&args.graph, config.get("graph")) {
        (Some(p), _) => p.clone(),
        (None, Some(p)) => PathBuf::from(p),
        (None, None) => bail!("--graph is required"),
    };
    let kind = parse_laplacian(&resolve(
        args.laplacian.clone(),
        config,
        "laplacian",
        "normalized".to_string(),
    )?)?;
    let metric = parse_metric(&resolve(
        args.metric.clone(),
        config,
        "metric",
        "hops".to_string(),
    )?)?;
    Ok(graph_pum::io::load_graph(&path, kind, metric)?)
}

fn kernel_spec(
    kernel: Option<String>,
    eps: Option<f64>,
    s: Option<f64>,
    t: Option<f64>,
    config: &HashMap<String, String>,
) -> Result<KernelSpec> {
    let family = resolve(kernel, config, "kernel", "spline".to_string())?;
    match family.as_str() {
        "spline" => Ok(KernelSpec::VariationalSpline {
            eps: resolve(eps, config, "eps", 0.001)?,
            s: resolve(s, config, "s", 2.0)?,
        }),
        "diffusion" => Ok(KernelSpec::Diffusion {
            t: resolve(t, config, "t", 1.0)?,
        }),
        other => bail!("unknown kernel family: {other}"),
    }
}

fn write_output(out: Option<&Path>, content: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, content)
            .with_context(|| format!("writing {}", path.display()))?,
        None => std::io::stdout().write_all(content.as_bytes())?,
    }
    Ok(())
}

fn resolve_test_signal(
    g: &Graph,
    signal: Option<&Path>,
    bandlimit: usize,
) -> Result<(Signal, SignalSpec)> {
    match signal {
        Some(path) => {
            let x = graph_pum::io::load_signal_csv(path, g.n())?;
            Ok((x.clone(), SignalSpec::External(x)))
        }
        None => {
            let spectrum = eigendecompose(g)?;
            let x = bandlimited_signal(&spectrum, bandlimit)?;
            Ok((x.clone(), SignalSpec::External(x)))
        }
    }
}

fn cmd_partition(args: PartitionArgs) -> Result<()> {
    let config = read_config(args.graph.config.as_deref())?;
    let g = load_graph(&args.graph, &config)?;
    let j = resolve(args.j, &config, "j", 8)?;
    let r = resolve(args.r, &config, "r", 8.0)?;
    let n = resolve_opt(args.n, &config, "n")?;
    let seed = resolve(args.seed, &config, "seed", 7)?;

    let w: Vec<usize> = match n {
        Some(n) => {
            if n == 0 || n > g.n() {
                bail!("--n must be in 1..={}", g.n());
            }
            sample_permutation(g.n(), seed)[..n].to_vec()
        }
        None => (0..g.n()).collect(),
    };
    let start = match resolve_opt(args.start, &config, "start")? {
        Some(label) => {
            if label == 0 || label > g.n() {
                bail!("--start label out of range");
            }
            label - 1
        }
        None => w[0],
    };
    let (centers, clustering) = greedy_j_center(&g, &w, j, start)?;
    let cover = build_cover(&g, &centers, &clustering, r)?;
    let csv = graph_pum::io::cover_to_csv(&cover)?;
    write_output(args.out.as_deref(), &csv)
}

fn cmd_interpolate(args: InterpolateArgs) -> Result<()> {
    let config = read_config(args.graph.config.as_deref())?;
    let g = load_graph(&args.graph, &config)?;
    let kernel = kernel_spec(args.kernel, args.eps, args.s, args.t, &config)?;
    let j = resolve(args.j, &config, "j", 8)?;
    let r = resolve(args.r, &config, "r", 8.0)?;
    let n = resolve(args.n, &config, "n", g.n() / 2)?;
    let seed = resolve(args.seed, &config, "seed", 7)?;
    let gamma = resolve(args.gamma, &config, "gamma", 0.0)?;
    let pou = parse_pou(&resolve(args.pou, &config, "pou", "cluster".to_string())?)?;
    let route = parse_route(&resolve(
        args.route,
        &config,
        "route",
        "spectral".to_string(),
    )?)?;
    let bandlimit = resolve(args.bandlimit, &config, "bandlimit", 10)?;

    if n == 0 || n > g.n() {
        bail!("--n must be in 1..={}", g.n());
    }
    let (x, _) = resolve_test_signal(&g, args.signal.as_deref(), bandlimit)?;
    let nodes = sample_permutation(g.n(), seed)[..n].to_vec();
    let samples = SampleSet::from_signal(&x, nodes)?;
    let pum_config = PumConfig {
        j,
        r,
        start: None,
        pou,
        kernel,
        gamma,
        route,
    };
    let approx = gbf_pum(&g, &samples, &pum_config)?;

    let mut out = String::from("vertex,true,approx,abs_error\n");
    for v in 0..g.n() {
        let err = (x[v] - approx.global[v]).abs();
        out.push_str(&format!(
            "{},{},{},{}\n",
            g.label(v),
            x[v],
            approx.global[v],
            err
        ));
    }
    write_output(args.out.as_deref(), &out)?;
    eprintln!(
        "{}",
        serde_json::json!({
            "rrmse": rrmse(&x, &approx.global)?,
            "n": n, "j": j, "r": r, "seed": seed,
        })
    );
    Ok(())
}

fn cmd_bench(args: BenchArgs) -> Result<()> {
    let config = read_config(args.graph.config.as_deref())?;
    let g = load_graph(&args.graph, &config)?;
    let kernel = kernel_spec(args.kernel, args.eps, args.s, args.t, &config)?;
    let j = resolve(args.j, &config, "j", 8)?;
    let r = resolve(args.r, &config, "r", 8.0)?;
    let gamma = resolve(args.gamma, &config, "gamma", 0.0)?;
    let pou = parse_pou(&resolve(args.pou, &config, "pou", "cluster".to_string())?)?;
    let route = parse_route(&resolve(
        args.route,
        &config,
        "route",
        "spectral".to_string(),
    )?)?;
    let bandlimit = resolve(args.bandlimit, &config, "bandlimit", 10)?;
    let grid_raw = resolve(
        args.grid,
        &config,
        "grid",
        "132,264,528,1056,2112".to_string(),
    )?;
    let grid: Vec<usize> = grid_raw
        .split(',')
        .map(|f| f.trim().parse::<usize>())
        .collect::<std::result::Result<_, _>>()
        .context("bad --grid")?;
    let seed_base = resolve(args.seed, &config, "seed", 7)?;
    let seed_count = resolve(args.seeds, &config, "seeds", 1)?;
    let seeds: Vec<u64> = (0..seed_count).map(|k| seed_base + k).collect();

    let (_, signal) = resolve_test_signal(&g, args.signal.as_deref(), bandlimit)?;
    let bench = BenchConfig {
        j,
        r,
        pou,
        kernel,
        gamma,
        route,
        grid,
        seeds,
        signal,
        baseline: args.baseline || config.get("baseline").map(|v| v == "true").unwrap_or(false),
    };
    let rows = graph_pum::run_benchmark(&g, &bench)?;

    let mut out = String::from("n,seed,rrmse,pum_seconds,global_seconds,global_rrmse,j,r\n");
    for row in &rows {
        out.push_str(&format!(
            "{},{},{},{:.6},{},{},{},{}\n",
            row.n_samples,
            row.seed,
            row.rrmse,
            row.pum_seconds,
            row.global_seconds
                .map(|s| format!("{s:.6}"))
                .unwrap_or_default(),
            row.global_rrmse.map(|e| e.to_string()).unwrap_or_default(),
            row.j,
            row.r
        ));
    }
    write_output(args.out.as_deref(), &out)?;
    eprintln!(
        "{}",
        serde_json::json!({
            "timing": "wall seconds per run; excludes graph ingestion and the test-signal synthesis, includes each method's own kernel assembly and solve",
        })
    );
    for (n, med) in median_rrmse_by_n(&rows) {
        eprintln!("{}", serde_json::json!({"n": n, "median_rrmse": med}));
    }
    Ok(())
}

struct CheckSink {
    lines: Vec<String>,
    all_pass: bool,
}

impl CheckSink {
    fn new() -> CheckSink {
        CheckSink {
            lines: Vec::new(),
            all_pass: true,
        }
    }

    fn record(&mut self, name: &str, instances: usize, worst: f64, pass: bool) {
        self.all_pass &= pass;
        self.lines.push(
            serde_json::json!({
                "check": name,
                "instances": instances,
                "worst": worst,
                "pass": pass,
            })
            .to_string(),
        );
    }
}

fn cmd_verify(args: VerifyArgs) -> Result<()> {
    use graph_pum::synthetic::{random_connected_graph, random_signal};
    let seed = args.seed.unwrap_or(1);
    let mut sink = CheckSink::new();
    let spline = KernelSpec::VariationalSpline { eps: 0.01, s: 2.0 };

    // product rules, including free-diagonal Laplacians
    let mut worst_grad = 0.0f64;
    let mut worst_lap = 0.0f64;
    for k in 0..60u64 {
        let n = 10 + (k as usize % 21);
        let base = random_connected_graph(
            n,
            n / 3,
            k % 2 == 0,
            seed * 1000 + k,
            LaplacianKind::Standard,
            MetricKind::ShortestPathHops,
        );
        let g = if k % 3 == 0 {
            let mut l = base.laplacian().clone();
            for i in 0..n {
                l[(i, i)] = ((i * 7 + k as usize) % 5) as f64 - 2.0;
            }
            Graph::from_laplacian(l, MetricKind::ShortestPathHops)?
        } else {
            base
        };
        let x = random_signal(n, seed + 2 * k);
        let y = random_signal(n, seed + 2 * k + 1);
        worst_grad = worst_grad.max(verify_product_rule_gradient(&g, &x, &y)?);
        worst_lap = worst_lap.max(verify_product_rule_laplacian(&g, &x, &y)?);
    }
    sink.record("product_rule_gradient", 60, worst_grad, worst_grad < 1e-12);
    sink.record("product_rule_laplacian", 60, worst_lap, worst_lap < 1e-12);

    // norm estimates at p in {1, 2, inf}
    let mut violations = 0usize;
    let mut count = 0usize;
    for k in 0..30u64 {
        let n = 8 + (k as usize % 13);
        let g = random_connected_graph(
            n,
            n / 3,
            false,
            seed * 2000 + k,
            LaplacianKind::Standard,
            MetricKind::ShortestPathWeighted,
        );
        let x = random_signal(n, seed + 100 + k);
        let y = random_signal(n, seed + 200 + k);
        for p in [1.0, 2.0, f64::INFINITY] {
            count += 1;
            if !verify_norm_estimates(&g, &x, &y, p)?.holds() {
                violations += 1;
            }
        }
    }
    sink.record("norm_estimates", count, violations as f64, violations == 0);

    // partition of unity identities for both Shepard kinds
    let mut worst_sum = 0.0f64;
    let mut pou_instances = 0usize;
    let mut bc_failures = 0usize;
    for k in 0..25u64 {
        let n = 15 + (k as usize % 30);
        let g = random_connected_graph(
            n,
            n / 4,
            true,
            seed * 3000 + k,
            LaplacianKind::Standard,
            MetricKind::ShortestPathHops,
        );
        let w: Vec<usize> = sample_permutation(n, seed + k)[..(n / 2).max(3)].to_vec();
        let j = 2 + (k as usize % 3);
        let (centers, clustering) = greedy_j_center(&g, &w, j, w[0])?;
        let cover = build_cover(&g, &centers, &clustering, 1.0)?;
        for kind in [PouKind::IndicatorSubdomain, PouKind::IndicatorCluster] {
            pou_instances += 1;
            let pou = shepard_partition(&cover, kind)?;
            let sum = pou.sum_signal();
            for v in 0..n {
                worst_sum = worst_sum.max((sum[v] - 1.0).abs());
            }
            if kind == PouKind::IndicatorCluster
                && !check_boundary_condition(&g, &cover, &pou).all_satisfied()
            {
                bc_failures += 1;
            }
        }
    }
    sink.record(
        "partition_of_unity_sum",
        pou_instances,
        worst_sum,
        worst_sum < 1e-12,
    );
    sink.record(
        "boundary_condition_cluster_r1",
        pou_instances / 2,
        bc_failures as f64,
        bc_failures == 0,
    );

    // global error bounds with the cluster partition
    let mut bound_failures = 0usize;
    let mut bound_count = 0usize;
    for k in 0..8u64 {
        let n = 24 + (k as usize % 12);
        let g = random_connected_graph(
            n,
            n / 3,
            true,
            seed * 4000 + k,
            LaplacianKind::Standard,
            MetricKind::ShortestPathHops,
        );
        let x = random_signal(n, seed + 300 + k);
        let nodes = sample_permutation(n, seed + 400 + k)[..n / 2].to_vec();
        let samples = SampleSet::from_signal(&x, nodes)?;
        let approx = gbf_pum(&g, &samples, &PumConfig::new(3, 1.0, spline))?;
        for p in [1.0, 2.0, f64::INFINITY] {
            bound_count += 1;
            if verify_global_bound(&g, &x, &approx, p).is_err() {
                bound_failures += 1;
            }
        }
    }
    sink.record(
        "global_error_bounds",
        bound_count,
        bound_failures as f64,
        bound_failures == 0,
    );

    // interpolation exactness and the single-subdomain degeneracy
    let mut worst_interp = 0.0f64;
    let mut worst_degen = 0.0f64;
    for k in 0..6u64 {
        let n = 30;
        let g = random_connected_graph(
            n,
            12,
            true,
            seed * 5000 + k,
            LaplacianKind::Standard,
            MetricKind::ShortestPathHops,
        );
        let x = random_signal(n, seed + 500 + k);
        let nodes = sample_permutation(n, seed + 600 + k)[..14].to_vec();
        let samples = SampleSet::from_signal(&x, nodes)?;
        let approx = gbf_pum(&g, &samples, &PumConfig::new(3, 1.0, spline))?;
        for (&w, &val) in samples.nodes.iter().zip(&samples.values) {
            worst_interp = worst_interp.max((approx.global[w] - val).abs());
        }
        let single = gbf_pum(&g, &samples, &PumConfig::new(1, 1.0, spline))?;
        let global = gbf_global(&g, spline, &samples, 0.0, SolveRoute::Spectral)?;
        let diff = &single.global - &global;
        worst_degen = worst_degen.max(node_norm(&diff, f64::INFINITY)?);
    }
    sink.record("interpolation_exactness", 6, worst_interp, worst_interp < 1e-8);
    sink.record("single_subdomain_degeneracy", 6, worst_degen, worst_degen < 1e-10);

    // greedy clustering against the exhaustive oracle
    let mut oracle_failures = 0usize;
    for k in 0..25u64 {
        let n = 8 + (k as usize % 11);
        let g = random_connected_graph(
            n,
            k as usize % 5,
            true,
            seed * 6000 + k,
            LaplacianKind::Standard,
            MetricKind::ShortestPathHops,
        );
        let w: Vec<usize> = sample_permutation(n, seed + 700 + k)[..(n / 2).max(2)].to_vec();
        let j = 1 + (k as usize % 3).min(w.len() - 1);
        let (q, _) = greedy_j_center(&g, &w, j, w[0])?;
        let h_greedy = fill_distance_all(&g, &q.centers)?;
        let all: Vec<usize> = (0..n).collect();
        let (_, h_opt) = optimal_j_center_bruteforce(&g, &all, j)?;
        let h_w = fill_distance_all(&g, &w)?;
        if h_greedy > 2.0 * h_opt + h_w + 1e-12 {
            oracle_failures += 1;
        }
    }
    sink.record(
        "greedy_vs_oracle_bound",
        25,
        oracle_failures as f64,
        oracle_failures == 0,
    );

    let mut text = sink.lines.join("\n");
    text.push('\n');
    write_output(args.out.as_deref(), &text)?;
    if !sink.all_pass {
        bail!("verification suite failed");
    }
    Ok(())
}

fn configure_threads() {
    if let Ok(raw) = std::env::var("GRAPH_PUM_THREADS") {
        if let Ok(threads) = raw.parse::<usize>() {
            if threads > 0 {
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(threads)
                    .build_global();
            }
        }
    }
}

fn main() {
    configure_threads();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Partition(args) => cmd_partition(args),
        Command::Interpolate(args) => cmd_interpolate(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Bench(args) => cmd_bench(args),
    };
    if let Err(err) = result {
        eprintln!("{}", serde_json::json!({ "error": err.to_string() }));
        std::process::exit(1);
    }
}
