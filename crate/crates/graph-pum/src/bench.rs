//! Seeded sampling-sweep benchmark harness: nested sampling sets of growing
//! size, RRMSE and wall time per run, optional global-GBF baseline.
//!
//! Timing covers the approximation pipeline only. Graph ingestion and the
//! full-graph eigendecomposition used to synthesize the bandlimited test
//! signal are experiment scaffolding, not part of either method, and are
//! excluded; the global baseline's own kernel assembly is part of the
//! method and is timed.

use std::time::Instant;

use crate::approximation::{
    gbf_global, gbf_pum, sample_permutation, KernelSpec, PumConfig, SampleSet, SolveRoute,
};
use crate::error::{Error, Result};
use crate::graph::{Graph, Signal};
use crate::partition::PouKind;
use crate::spectral::{bandlimited_signal, eigendecompose};

/// Test signal for a sweep: a bandlimited sum of leading eigenvectors
/// (synthesized once per graph) or an externally supplied signal.
#[derive(Debug, Clone)]
pub enum SignalSpec {
    Bandlimited { k: usize },
    External(Signal),
}

/// Sweep configuration. The grid must be ascending and every entry must
/// admit `j` centers.
#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub j: usize,
    pub r: f64,
    pub pou: PouKind,
    pub kernel: KernelSpec,
    pub gamma: f64,
    pub route: SolveRoute,
    pub grid: Vec<usize>,
    pub seeds: Vec<u64>,
    pub signal: SignalSpec,
    /// Also run and time the global GBF fit per row.
    pub baseline: bool,
}

/// One sweep row: sample count, seed, accuracy and wall times.
#[derive(Debug, Clone)]
pub struct BenchmarkRow {
    pub n_samples: usize,
    pub seed: u64,
    pub rrmse: f64,
    pub pum_seconds: f64,
    pub global_seconds: Option<f64>,
    pub global_rrmse: Option<f64>,
    pub j: usize,
    pub r: f64,
}

fn validate(g: &Graph, config: &BenchConfig) -> Result<()> {
    if config.grid.is_empty() {
        return Err(Error::InvalidConfig("empty sample grid".into()));
    }
    if config.grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidConfig(
            "sample grid must be strictly ascending".into(),
        ));
    }
    let max = *config.grid.last().unwrap();
    if max > g.n() {
        return Err(Error::InvalidConfig(format!(
            "grid entry {max} exceeds the vertex count {}",
            g.n()
        )));
    }
    if config.j > config.grid[0] {
        return Err(Error::JTooLarge {
            j: config.j,
            available: config.grid[0],
        });
    }
    if config.r < 0.0 {
        return Err(Error::NegativeRadius(config.r));
    }
    if config.seeds.is_empty() {
        return Err(Error::InvalidConfig("no seeds".into()));
    }
    Ok(())
}

/// Resolves the sweep's test signal, synthesizing the bandlimited one from
/// the graph spectrum when needed.
pub fn resolve_signal(g: &Graph, spec: &SignalSpec) -> Result<Signal> {
    match spec {
        SignalSpec::Bandlimited { k } => {
            let spectrum = eigendecompose(g)?;
            bandlimited_signal(&spectrum, *k)
        }
        SignalSpec::External(x) => {
            if x.len() != g.n() {
                return Err(Error::DimensionMismatch {
                    expected: g.n(),
                    got: x.len(),
                });
            }
            Ok(x.clone())
        }
    }
}

/// Runs the sweep: for every seed a fresh nested sampling sequence, for
/// every grid size one PUM run (and optionally one global baseline run).
/// Rows are sorted by `(n_samples, seed)`.
pub fn run_benchmark(g: &Graph, config: &BenchConfig) -> Result<Vec<BenchmarkRow>> {
    validate(g, config)?;
    let x = resolve_signal(g, &config.signal)?;

    let mut rows = Vec::with_capacity(config.grid.len() * config.seeds.len());
    for &seed in &config.seeds {
        let permutation = sample_permutation(g.n(), seed);
        for &n_samples in &config.grid {
            let nodes = permutation[..n_samples].to_vec();
            let samples = SampleSet::from_signal(&x, nodes)?;
            let pum_config = PumConfig {
                j: config.j,
                r: config.r,
                start: None,
                pou: config.pou,
                kernel: config.kernel,
                gamma: config.gamma,
                route: config.route,
            };
            let t = Instant::now();
            let approx = gbf_pum(g, &samples, &pum_config)?;
            let pum_seconds = t.elapsed().as_secs_f64();
            let rrmse = crate::analysis::rrmse(&x, &approx.global)?;

            let (global_seconds, global_rrmse) = if config.baseline {
                let t = Instant::now();
                let global = gbf_global(g, config.kernel, &samples, config.gamma, config.route)?;
                let secs = t.elapsed().as_secs_f64();
                (Some(secs), Some(crate::analysis::rrmse(&x, &global)?))
            } else {
                (None, None)
            };

            rows.push(BenchmarkRow {
                n_samples,
                seed,
                rrmse,
                pum_seconds,
                global_seconds,
                global_rrmse,
                j: config.j,
                r: config.r,
            });
        }
    }
    rows.sort_by(|a, b| (a.n_samples, a.seed).cmp(&(b.n_samples, b.seed)));
    Ok(rows)
}

/// Median of a slice (averaging the middle pair for even lengths).
pub fn median(values: &mut [f64]) -> f64 {
    assert!(!values.is_empty());
    values.sort_by(|a, b| a.partial_cmp(b).expect("finite values"));
    let mid = values.len() / 2;
    if values.len() % 2 == 1 {
        values[mid]
    } else {
        0.5 * (values[mid - 1] + values[mid])
    }
}

/// Median RRMSE per grid size, ascending in `n_samples`.
pub fn median_rrmse_by_n(rows: &[BenchmarkRow]) -> Vec<(usize, f64)> {
    let mut by_n: std::collections::BTreeMap<usize, Vec<f64>> = std::collections::BTreeMap::new();
    for row in rows {
        by_n.entry(row.n_samples).or_default().push(row.rrmse);
    }
    by_n
        .into_iter()
        .map(|(n, mut v)| (n, median(&mut v)))
        .collect()
}
