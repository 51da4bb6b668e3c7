//! Local GBF regularized least squares fits and the global GBF-PUM
//! pipeline: cluster, augment, build the partition of unity, fit every
//! subdomain independently, and blend the local approximants.

use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::clustering::greedy_j_center;
use crate::error::{Error, Result};
use crate::graph::{Graph, Signal, Subgraph};
use crate::kernels::{
    diffusion_kernel, spline_kernel, spline_kernel_columns_by_solve, GbfKernel,
};
use crate::partition::{
    build_cover, check_boundary_condition, shepard_partition, Cover, PartitionOfUnity, PouKind,
};
use crate::spectral::eigendecompose;

/// Sampling nodes with the signal values observed there.
#[derive(Debug, Clone)]
pub struct SampleSet {
    pub nodes: Vec<usize>,
    pub values: Vec<f64>,
}

impl SampleSet {
    pub fn new(nodes: Vec<usize>, values: Vec<f64>) -> Result<SampleSet> {
        if nodes.is_empty() {
            return Err(Error::EmptyNodeSet);
        }
        if nodes.len() != values.len() {
            return Err(Error::DimensionMismatch {
                expected: nodes.len(),
                got: values.len(),
            });
        }
        let mut seen = std::collections::HashSet::new();
        for (&v, &x) in nodes.iter().zip(&values) {
            if !seen.insert(v) {
                return Err(Error::DuplicateSample(v));
            }
            if !x.is_finite() {
                return Err(Error::NonFiniteSample(v));
            }
        }
        Ok(SampleSet { nodes, values })
    }

    /// Samples a known signal on the given nodes.
    pub fn from_signal(x: &Signal, nodes: Vec<usize>) -> Result<SampleSet> {
        let values = nodes.iter().map(|&v| x[v]).collect();
        SampleSet::new(nodes, values)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Seeded random vertex permutation. Prefixes of the permutation form the
/// nested sampling sequence `W_1 c W_2 c ... c W_n` used by the
/// benchmarks.
pub fn sample_permutation(n: usize, seed: u64) -> Vec<usize> {
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    order.shuffle(&mut rng);
    order
}

/// Kernel family requested for the local fits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KernelSpec {
    Diffusion { t: f64 },
    VariationalSpline { eps: f64, s: f64 },
}

impl KernelSpec {
    pub fn build(&self, spectrum: crate::spectral::Spectrum) -> Result<GbfKernel> {
        match *self {
            KernelSpec::Diffusion { t } => Ok(diffusion_kernel(spectrum, t)),
            KernelSpec::VariationalSpline { eps, s } => spline_kernel(spectrum, eps, s),
        }
    }

    /// Spline order as an integer, when the factorization route applies.
    pub fn integer_spline_order(&self) -> Option<(f64, u32)> {
        match *self {
            KernelSpec::VariationalSpline { eps, s }
                if s > 0.0 && s.fract() == 0.0 && s <= u32::MAX as f64 =>
            {
                Some((eps, s as u32))
            }
            _ => None,
        }
    }
}

/// How kernel matrices are assembled: the Mercer sum over the subgraph
/// spectrum, or (integer-order splines only) columns by repeated solves
/// against the shifted Laplacian.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SolveRoute {
    #[default]
    Spectral,
    Factorization,
}

/// Pipeline configuration: number of subdomains, augmentation radius,
/// partition kind, kernel, regularization and assembly route.
#[derive(Debug, Clone, Copy)]
pub struct PumConfig {
    pub j: usize,
    pub r: f64,
    /// First greedy center; defaults to the first sampling node.
    pub start: Option<usize>,
    pub pou: PouKind,
    pub kernel: KernelSpec,
    pub gamma: f64,
    pub route: SolveRoute,
}

impl PumConfig {
    pub fn new(j: usize, r: f64, kernel: KernelSpec) -> PumConfig {
        PumConfig {
            j,
            r,
            start: None,
            pou: PouKind::IndicatorCluster,
            kernel,
            gamma: 0.0,
            route: SolveRoute::Spectral,
        }
    }
}

/// Result of one regularized least squares fit: coefficients of the kernel
/// translates at the sampling nodes.
#[derive(Debug, Clone)]
pub struct RlsFit {
    pub sample_nodes: Vec<usize>,
    pub coefficients: DVector<f64>,
    pub gamma: f64,
    /// `||(K + gamma N I) c - rhs|| / ||rhs||` of the returned solution.
    pub residual: f64,
    /// Whether the positive definite factorization succeeded; `false`
    /// records the pivoted fallback.
    pub spd_path: bool,
}

fn solve_rls(kernel_at_samples: &DMatrix<f64>, values: &[f64], gamma: f64) -> Result<RlsFitCore> {
    let n = values.len();
    let rhs = DVector::from_column_slice(values);
    let mut system = kernel_at_samples.clone();
    for i in 0..n {
        system[(i, i)] += gamma * n as f64;
    }
    let (coefficients, spd_path) = match system.clone().cholesky() {
        Some(chol) => (chol.solve(&rhs), true),
        None => {
            let solved = system.clone().lu().solve(&rhs).ok_or(Error::SingularSystem)?;
            (solved, false)
        }
    };
    let rhs_norm = rhs.norm();
    let residual = if rhs_norm == 0.0 {
        (&system * &coefficients).norm()
    } else {
        (&system * &coefficients - &rhs).norm() / rhs_norm
    };
    Ok(RlsFitCore {
        coefficients,
        residual,
        spd_path,
    })
}

struct RlsFitCore {
    coefficients: DVector<f64>,
    residual: f64,
    spd_path: bool,
}

/// Solves `(K_{f,W} + gamma N I) c = x|_W` on the kernel's graph. With
/// `gamma = 0` the fit interpolates the samples.
pub fn fit_local(g: &Graph, kernel: &GbfKernel, samples: &SampleSet, gamma: f64) -> Result<RlsFit> {
    if kernel.n() != g.n() {
        return Err(Error::DimensionMismatch {
            expected: g.n(),
            got: kernel.n(),
        });
    }
    for &v in &samples.nodes {
        if v >= g.n() {
            return Err(Error::VertexOutOfRange { index: v, n: g.n() });
        }
    }
    let km = kernel.matrix(&samples.nodes)?;
    let core = solve_rls(&km.entries, &samples.values, gamma)?;
    Ok(RlsFit {
        sample_nodes: samples.nodes.clone(),
        coefficients: core.coefficients,
        gamma,
        residual: core.residual,
        spd_path: core.spd_path,
    })
}

/// Expansion `x_*(v) = sum_i c_i K_f(v, w_i)` over the kernel's whole
/// graph.
pub fn evaluate_fit(kernel: &GbfKernel, fit: &RlsFit) -> Result<Signal> {
    let all: Vec<usize> = (0..kernel.n()).collect();
    let cross = kernel.cross_matrix(&all, &fit.sample_nodes)?;
    Ok(Signal::new(&cross * &fit.coefficients))
}

/// One local subdomain fit inside a PUM run.
#[derive(Debug, Clone)]
pub struct LocalFit {
    pub subdomain: usize,
    pub subgraph: Subgraph,
    /// Positions in the subgraph (local indices) of the local samples.
    pub sample_nodes_local: Vec<usize>,
    pub sample_values: Vec<f64>,
    pub coefficients: DVector<f64>,
    /// Local approximant over the subgraph's vertices.
    pub values: Signal,
    pub residual: f64,
    pub spd_path: bool,
}

/// A finished GBF-PUM approximation: the cover, the partition of unity,
/// every local fit, and the blended global signal.
#[derive(Debug, Clone)]
pub struct PumApproximant {
    pub cover: Cover,
    pub pou: PartitionOfUnity,
    pub fits: Vec<LocalFit>,
    pub global: Signal,
    pub config: PumConfig,
}

impl PumApproximant {
    /// Whether the partition satisfies the boundary condition on every
    /// subdomain (needed by the gradient and Laplacian error bounds).
    pub fn boundary_condition_holds(&self, g: &Graph) -> bool {
        check_boundary_condition(g, &self.cover, &self.pou).all_satisfied()
    }
}

fn fit_subdomain(
    g: &Graph,
    cover: &Cover,
    samples: &SampleSet,
    config: &PumConfig,
    j: usize,
) -> Result<LocalFit> {
    let subgraph = g.extract_subgraph(&cover.subdomains[j])?;
    let mut local_nodes = Vec::new();
    let mut local_values = Vec::new();
    for (&w, &x) in samples.nodes.iter().zip(&samples.values) {
        if let Some(local) = subgraph.local_index(w) {
            local_nodes.push(local);
            local_values.push(x);
        }
    }
    // the restricted clustering keeps at least one sampling node per cluster
    assert!(
        !local_nodes.is_empty(),
        "subdomain {j} lost every sampling node"
    );

    let (coefficients, values, residual, spd_path) = match config.route {
        SolveRoute::Spectral => {
            let spectrum = eigendecompose(&subgraph.graph)?;
            let kernel = config.kernel.build(spectrum)?;
            let km = kernel.matrix(&local_nodes)?;
            let core = solve_rls(&km.entries, &local_values, config.gamma)?;
            let all: Vec<usize> = (0..subgraph.graph.n()).collect();
            let cross = kernel.cross_matrix(&all, &local_nodes)?;
            let values = Signal::new(&cross * &core.coefficients);
            (core.coefficients, values, core.residual, core.spd_path)
        }
        SolveRoute::Factorization => {
            let (eps, s) = config.kernel.integer_spline_order().ok_or_else(|| {
                Error::InvalidConfig(
                    "factorization route requires an integer-order spline kernel".into(),
                )
            })?;
            let solved = spline_kernel_columns_by_solve(&subgraph.graph, eps, s, &local_nodes)?;
            let k_w = DMatrix::from_fn(local_nodes.len(), local_nodes.len(), |r, c| {
                solved.columns[(local_nodes[r], c)]
            });
            let core = solve_rls(&k_w, &local_values, config.gamma)?;
            let values = Signal::new(&solved.columns * &core.coefficients);
            (
                core.coefficients,
                values,
                core.residual,
                core.spd_path && solved.positive_definite,
            )
        }
    };

    Ok(LocalFit {
        subdomain: j,
        subgraph,
        sample_nodes_local: local_nodes,
        sample_values: local_values,
        coefficients,
        values,
        residual,
        spd_path,
    })
}

/// Full GBF-PUM pipeline: restricted J-center clustering on the sampling
/// set, cluster augmentation, Shepard partition of unity, independent local
/// fits (run in parallel), and the blended global approximant.
pub fn gbf_pum(g: &Graph, samples: &SampleSet, config: &PumConfig) -> Result<PumApproximant> {
    let start = config.start.unwrap_or(samples.nodes[0]);
    let (centers, clustering) = greedy_j_center(g, &samples.nodes, config.j, start)?;
    let cover = build_cover(g, &centers, &clustering, config.r)?;
    let pou = shepard_partition(&cover, config.pou)?;

    let fits: Vec<LocalFit> = (0..config.j)
        .into_par_iter()
        .map(|j| fit_subdomain(g, &cover, samples, config, j))
        .collect::<Result<_>>()?;

    // deterministic serial blend: x_* = sum_j phi_j * x_local_j
    let mut global = Signal::zeros(g.n());
    for (j, fit) in fits.iter().enumerate() {
        let phi = pou.support_values(j);
        for (local, &v) in fit.subgraph.nodes.iter().enumerate() {
            global[v] += phi[local] * fit.values[local];
        }
    }

    Ok(PumApproximant {
        cover,
        pou,
        fits,
        global,
        config: *config,
    })
}

/// Single global GBF fit over the whole graph, the baseline the PUM is
/// compared against. The same assembly routes as the local fits apply.
pub fn gbf_global(
    g: &Graph,
    kernel: KernelSpec,
    samples: &SampleSet,
    gamma: f64,
    route: SolveRoute,
) -> Result<Signal> {
    match route {
        SolveRoute::Spectral => {
            let spectrum = eigendecompose(g)?;
            let k = kernel.build(spectrum)?;
            let fit = fit_local(g, &k, samples, gamma)?;
            evaluate_fit(&k, &fit)
        }
        SolveRoute::Factorization => {
            let (eps, s) = kernel.integer_spline_order().ok_or_else(|| {
                Error::InvalidConfig(
                    "factorization route requires an integer-order spline kernel".into(),
                )
            })?;
            let solved = spline_kernel_columns_by_solve(g, eps, s, &samples.nodes)?;
            let nw = samples.nodes.len();
            let k_w =
                DMatrix::from_fn(nw, nw, |r, c| solved.columns[(samples.nodes[r], c)]);
            let core = solve_rls(&k_w, &samples.values, gamma)?;
            Ok(Signal::new(&solved.columns * &core.coefficients))
        }
    }
}
