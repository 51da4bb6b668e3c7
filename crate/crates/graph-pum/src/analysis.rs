//! Numerical verification of the product rules, the norm estimates, and the
//! local-to-global error bounds, plus RRMSE and per-subdomain error
//! reporting.
//!
//! The error bounds are instantiated with measured local norms (the
//! tightest admissible values), which turns them into deterministic
//! inequalities that every correct run must satisfy: the zeroth-order bound
//! unconditionally, the gradient and Laplacian bounds whenever the
//! partition of unity passes the boundary-condition check.

use crate::approximation::PumApproximant;
use crate::error::{Error, Result};
use crate::graph::{
    dual_exponent, edge_norm, hybrid_norm, node_norm, Graph, Signal,
};
use crate::partition::check_boundary_condition;

/// Measured local error norms on one subdomain: the plain difference, its
/// gradient, and the local Laplacian applied to it.
#[derive(Debug, Clone, Copy)]
pub struct LocalErrorTriple {
    pub subdomain: usize,
    pub e0: f64,
    pub e1: f64,
    pub e2: f64,
    pub p: f64,
}

/// Measured global errors against the right sides assembled from the local
/// triples and the partition norms.
#[derive(Debug, Clone)]
pub struct GlobalBoundReport {
    pub p: f64,
    pub q: f64,
    /// Left sides: error, gradient of error, Laplacian of error.
    pub measured: [f64; 3],
    /// Right sides of the three bound lines.
    pub bound: [f64; 3],
    /// Per subdomain `||grad phi_j||_{inf,p;E}`.
    pub partition_grad_p: Vec<f64>,
    /// Per subdomain `||grad phi_j||_{inf,q;E}`.
    pub partition_grad_q: Vec<f64>,
    /// Per subdomain `||L_S phi_j||_{inf;G}`.
    pub partition_lap_inf: Vec<f64>,
    pub bc_satisfied: bool,
    pub locals: Vec<LocalErrorTriple>,
}

const DOMINANCE_SLACK: f64 = 1e-9;

fn dominated(measured: f64, bound: f64) -> bool {
    measured <= bound * (1.0 + DOMINANCE_SLACK) + 1e-12
}

/// Max residual of the gradient product rule over all directed edges.
pub fn verify_product_rule_gradient(g: &Graph, x: &Signal, y: &Signal) -> Result<f64> {
    let xy = Signal::from_vec((0..g.n()).map(|v| x[v] * y[v]).collect());
    let grad_xy = g.gradient(&xy)?;
    let grad_x = g.gradient(x)?;
    let grad_y = g.gradient(y)?;
    let mut worst = 0.0f64;
    for e in g.directed_edges() {
        let expected = grad_x[e.index] * y[e.from] + x[e.to] * grad_y[e.index];
        worst = worst.max((grad_xy[e.index] - expected).abs());
    }
    Ok(worst)
}

/// Max residual of the Laplacian product rule over all vertices. The rule
/// mixes the graph's own Laplacian with the standard one derived from its
/// adjacency, so `Custom` diagonals exercise the general form.
pub fn verify_product_rule_laplacian(g: &Graph, x: &Signal, y: &Signal) -> Result<f64> {
    let xy = Signal::from_vec((0..g.n()).map(|v| x[v] * y[v]).collect());
    let l_xy = g.laplacian_apply(&xy)?;
    let l_x = g.laplacian_apply(x)?;
    let ls_y = g.standard_laplacian_apply(y)?;
    let mut worst = 0.0f64;
    for v in 0..g.n() {
        let correction: f64 = g
            .neighbors(v)
            .map(|(u, a)| -a * (x[v] - x[u]) * (y[v] - y[u]))
            .sum();
        let expected = l_x[v] * y[v] + x[v] * ls_y[v] + correction;
        worst = worst.max((l_xy[v] - expected).abs());
    }
    Ok(worst)
}

/// Both sides of the two norm estimates for a pair of signals.
#[derive(Debug, Clone, Copy)]
pub struct NormEstimateReport {
    pub p: f64,
    pub gradient_lhs: f64,
    pub gradient_rhs: f64,
    pub laplacian_lhs: f64,
    pub laplacian_rhs: f64,
}

impl NormEstimateReport {
    pub fn gradient_slack(&self) -> f64 {
        self.gradient_rhs - self.gradient_lhs
    }

    pub fn laplacian_slack(&self) -> f64 {
        self.laplacian_rhs - self.laplacian_lhs
    }

    pub fn holds(&self) -> bool {
        dominated(self.gradient_lhs, self.gradient_rhs)
            && dominated(self.laplacian_lhs, self.laplacian_rhs)
    }
}

/// Evaluates the product-rule norm estimates for the pair `(x, y)` at
/// exponent `p` (dual `q` on the Laplacian line).
pub fn verify_norm_estimates(g: &Graph, x: &Signal, y: &Signal, p: f64) -> Result<NormEstimateReport> {
    let q = dual_exponent(p);
    let xy = Signal::from_vec((0..g.n()).map(|v| x[v] * y[v]).collect());
    let grad_x = g.gradient(x)?;
    let grad_y = g.gradient(y)?;

    let gradient_lhs = edge_norm(&g.gradient(&xy)?, p)?;
    let gradient_rhs = edge_norm(&grad_x, p)? * node_norm(y, f64::INFINITY)?
        + node_norm(x, p)? * hybrid_norm(g, &grad_y, p)?;

    let laplacian_lhs = node_norm(&g.laplacian_apply(&xy)?, p)?;
    let laplacian_rhs = node_norm(&g.laplacian_apply(x)?, p)? * node_norm(y, f64::INFINITY)?
        + node_norm(x, p)? * node_norm(&g.standard_laplacian_apply(y)?, f64::INFINITY)?
        + edge_norm(&grad_x, p)? * hybrid_norm(g, &grad_y, q)?;

    Ok(NormEstimateReport {
        p,
        gradient_lhs,
        gradient_rhs,
        laplacian_lhs,
        laplacian_rhs,
    })
}

/// Measured local error norms per subdomain for a known true signal.
pub fn measure_local_errors(
    x: &Signal,
    approximant: &PumApproximant,
    p: f64,
) -> Result<Vec<LocalErrorTriple>> {
    approximant
        .fits
        .iter()
        .map(|fit| {
            let local_true = x.restrict(&fit.subgraph.nodes);
            let err = &local_true - &fit.values;
            let e0 = node_norm(&err, p)?;
            let e1 = edge_norm(&fit.subgraph.graph.gradient(&err)?, p)?;
            let e2 = node_norm(&fit.subgraph.graph.laplacian_apply(&err)?, p)?;
            Ok(LocalErrorTriple {
                subdomain: fit.subdomain,
                e0,
                e1,
                e2,
                p,
            })
        })
        .collect()
}

/// Measures the three global error norms and the assembled right sides, and
/// asserts dominance: the zeroth-order line always, the gradient and
/// Laplacian lines whenever the boundary condition holds.
pub fn verify_global_bound(
    g: &Graph,
    x: &Signal,
    approximant: &PumApproximant,
    p: f64,
) -> Result<GlobalBoundReport> {
    let q = dual_exponent(p);
    let err = x - &approximant.global;
    let measured = [
        node_norm(&err, p)?,
        edge_norm(&g.gradient(&err)?, p)?,
        node_norm(&g.laplacian_apply(&err)?, p)?,
    ];

    let locals = measure_local_errors(x, approximant, p)?;

    let j_count = approximant.cover.num_subdomains();
    let mut partition_grad_p = Vec::with_capacity(j_count);
    let mut partition_grad_q = Vec::with_capacity(j_count);
    let mut partition_lap_inf = Vec::with_capacity(j_count);
    for j in 0..j_count {
        let phi = approximant.pou.to_full_signal(j);
        let grad_phi = g.gradient(&phi)?;
        partition_grad_p.push(hybrid_norm(g, &grad_phi, p)?);
        partition_grad_q.push(hybrid_norm(g, &grad_phi, q)?);
        partition_lap_inf.push(node_norm(
            &g.standard_laplacian_apply(&phi)?,
            f64::INFINITY,
        )?);
    }

    let bound0: f64 = locals.iter().map(|t| t.e0).sum();
    let bound1: f64 = locals
        .iter()
        .enumerate()
        .map(|(j, t)| t.e1 + partition_grad_p[j] * t.e0)
        .sum();
    let bound2: f64 = locals
        .iter()
        .enumerate()
        .map(|(j, t)| t.e2 + partition_grad_q[j] * t.e1 + partition_lap_inf[j] * t.e0)
        .sum();

    let bc_satisfied =
        check_boundary_condition(g, &approximant.cover, &approximant.pou).all_satisfied();

    if !dominated(measured[0], bound0) {
        return Err(Error::BoundViolated {
            line: "(i)'",
            measured: measured[0],
            bound: bound0,
        });
    }
    if bc_satisfied {
        if !dominated(measured[1], bound1) {
            return Err(Error::BoundViolated {
                line: "(ii)'",
                measured: measured[1],
                bound: bound1,
            });
        }
        if !dominated(measured[2], bound2) {
            return Err(Error::BoundViolated {
                line: "(iii)'",
                measured: measured[2],
                bound: bound2,
            });
        }
    }

    Ok(GlobalBoundReport {
        p,
        q,
        measured,
        bound: [bound0, bound1, bound2],
        partition_grad_p,
        partition_grad_q,
        partition_lap_inf,
        bc_satisfied,
        locals,
    })
}

/// Relative root mean square error `||x - x_star||_2 / ||x||_2`.
pub fn rrmse(x: &Signal, x_star: &Signal) -> Result<f64> {
    if x.len() != x_star.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            got: x_star.len(),
        });
    }
    let denom = x.norm2();
    if denom == 0.0 {
        return Err(Error::ZeroReference);
    }
    Ok((x - x_star).norm2() / denom)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::approximation::{gbf_pum, sample_permutation, KernelSpec, PumConfig, SampleSet};
    use crate::graph::{LaplacianKind, MetricKind};
    use crate::partition::PouKind;
    use crate::synthetic::{random_connected_graph, random_signal};
    use approx::assert_relative_eq;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const SPLINE: KernelSpec = KernelSpec::VariationalSpline { eps: 0.01, s: 2.0 };

    fn grf(n: usize, seed: u64) -> Graph {
        random_connected_graph(
            n,
            n / 2,
            false,
            seed,
            LaplacianKind::Standard,
            MetricKind::ShortestPathWeighted,
        )
    }

    fn custom_diagonal_graph(n: usize, seed: u64) -> Graph {
        let base = grf(n, seed);
        let mut l = base.laplacian().clone();
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xdead);
        for i in 0..n {
            l[(i, i)] = rng.gen_range(-2.0..2.0);
        }
        Graph::from_laplacian(l, MetricKind::ShortestPathHops).unwrap()
    }

    #[test]
    fn gradient_rule_with_constant_factor_is_exact() {
        let g = grf(12, 1);
        let x = random_signal(12, 2);
        let ones = Signal::constant(12, 1.0);
        assert_eq!(verify_product_rule_gradient(&g, &x, &ones).unwrap(), 0.0);
    }

    #[test]
    fn product_rules_hold_on_random_instances() {
        for seed in 0..50u64 {
            let n = 10 + (seed as usize % 21);
            let g = if seed % 3 == 0 {
                custom_diagonal_graph(n, seed)
            } else {
                grf(n, seed)
            };
            let x = random_signal(n, 100 + seed);
            let y = random_signal(n, 200 + seed);
            assert!(verify_product_rule_gradient(&g, &x, &y).unwrap() < 1e-12);
            assert!(verify_product_rule_laplacian(&g, &x, &y).unwrap() < 1e-12);
            // squaring a signal is the x = y special case
            assert!(verify_product_rule_gradient(&g, &x, &x).unwrap() < 1e-12);
        }
    }

    #[test]
    fn laplacian_rule_with_constant_x() {
        let g = custom_diagonal_graph(9, 7);
        let c = Signal::constant(9, 2.0);
        let y = random_signal(9, 8);
        assert!(verify_product_rule_laplacian(&g, &c, &y).unwrap() < 1e-12);
    }

    #[test]
    fn norm_estimates_on_random_instances() {
        for seed in 0..30u64 {
            let n = 8 + (seed as usize % 17);
            let g = if seed % 4 == 0 {
                custom_diagonal_graph(n, seed)
            } else {
                grf(n, seed)
            };
            let x = random_signal(n, 300 + seed);
            let y = random_signal(n, 400 + seed);
            for p in [1.0, 2.0, f64::INFINITY] {
                let report = verify_norm_estimates(&g, &x, &y, p).unwrap();
                assert!(report.holds(), "norm estimate failed at p = {p}");
                assert!(report.gradient_slack() >= -1e-12);
                assert!(report.laplacian_slack() >= -1e-12);
            }
        }
    }

    #[test]
    fn norm_estimates_zero_signals() {
        let g = grf(10, 5);
        let z = Signal::zeros(10);
        let report = verify_norm_estimates(&g, &z, &z, 2.0).unwrap();
        assert_eq!(report.gradient_lhs, 0.0);
        assert_eq!(report.gradient_rhs, 0.0);
        assert_eq!(report.laplacian_lhs, 0.0);
    }

    fn pum_instance(n: usize, seed: u64, pou: PouKind) -> (Graph, Signal, PumApproximant) {
        let g = random_connected_graph(
            n,
            n / 3,
            true,
            seed,
            LaplacianKind::Standard,
            MetricKind::ShortestPathHops,
        );
        let x = random_signal(n, seed ^ 0xabc);
        let nodes = sample_permutation(n, seed)[..(n / 2).max(4)].to_vec();
        let samples = SampleSet::from_signal(&x, nodes).unwrap();
        let config = PumConfig {
            pou,
            ..PumConfig::new(3, 1.0, SPLINE)
        };
        let approx = gbf_pum(&g, &samples, &config).unwrap();
        (g, x, approx)
    }

    #[test]
    fn oracle_fit_gives_zero_triples() {
        let (_, x, mut approx) = pum_instance(24, 3, PouKind::IndicatorCluster);
        for fit in &mut approx.fits {
            fit.values = x.restrict(&fit.subgraph.nodes);
        }
        for t in measure_local_errors(&x, &approx, 2.0).unwrap() {
            assert_eq!(t.e0, 0.0);
            assert_eq!(t.e1, 0.0);
            assert_relative_eq!(t.e2, 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn full_sampling_gives_tiny_local_errors() {
        let g = grf(20, 9);
        let x = random_signal(20, 10);
        let samples = SampleSet::from_signal(&x, (0..20).collect()).unwrap();
        let config = PumConfig::new(3, 2.0, SPLINE);
        let approx = gbf_pum(&g, &samples, &config).unwrap();
        for t in measure_local_errors(&x, &approx, 2.0).unwrap() {
            assert!(t.e0 < 1e-8, "E0 = {}", t.e0);
        }
    }

    #[test]
    fn global_bounds_hold_with_cluster_partition() {
        for seed in 0..15u64 {
            let (g, x, approx) = pum_instance(26 + (seed as usize % 10), 50 + seed, PouKind::IndicatorCluster);
            for p in [1.0, 2.0, f64::INFINITY] {
                let report = verify_global_bound(&g, &x, &approx, p).unwrap();
                assert!(report.bc_satisfied, "r = 1 cluster partition satisfies (BC)");
                for line in 0..3 {
                    assert!(
                        report.measured[line] <= report.bound[line] * (1.0 + 1e-9) + 1e-12,
                        "line {line} at p = {p}: {} > {}",
                        report.measured[line],
                        report.bound[line]
                    );
                }
            }
        }
    }

    #[test]
    fn subdomain_partition_is_a_negative_control() {
        // indicator-on-subdomain weights violate (BC) once subdomains
        // overlap, and only the zeroth-order bound is asserted
        let mut found_violation = false;
        for seed in 0..10u64 {
            let (g, x, approx) = pum_instance(24, 80 + seed, PouKind::IndicatorSubdomain);
            let report = verify_global_bound(&g, &x, &approx, 2.0).unwrap();
            if !report.bc_satisfied {
                found_violation = true;
            }
        }
        assert!(found_violation, "expected at least one (BC) violation");
    }

    #[test]
    fn single_subdomain_bound_is_tight() {
        let g = grf(16, 21);
        let x = random_signal(16, 22);
        let nodes = sample_permutation(16, 23)[..8].to_vec();
        let samples = SampleSet::from_signal(&x, nodes).unwrap();
        let config = PumConfig::new(1, 1.0, SPLINE);
        let approx = gbf_pum(&g, &samples, &config).unwrap();
        let report = verify_global_bound(&g, &x, &approx, 2.0).unwrap();
        // with one subdomain the right side of the first line is the single
        // local error, which equals the global one
        assert_relative_eq!(report.measured[0], report.bound[0], max_relative = 1e-10);
    }

    #[test]
    fn rrmse_by_hand() {
        let x = Signal::from_vec(vec![1.0, 1.0]);
        assert_eq!(rrmse(&x, &x).unwrap(), 0.0);
        assert_eq!(rrmse(&x, &Signal::zeros(2)).unwrap(), 1.0);
        let half = Signal::from_vec(vec![1.0, 0.0]);
        assert_relative_eq!(
            rrmse(&x, &half).unwrap(),
            1.0 / 2.0f64.sqrt(),
            max_relative = 1e-15
        );
        assert!(matches!(
            rrmse(&Signal::zeros(2), &x),
            Err(Error::ZeroReference)
        ));
    }

    #[test]
    fn laplacian_rule_catches_wrong_formula() {
        // dropping the correction term must produce a visible residual
        let g = grf(10, 31);
        let x = random_signal(10, 32);
        let y = random_signal(10, 33);
        let xy = Signal::from_vec((0..10).map(|v| x[v] * y[v]).collect());
        let l_xy = g.laplacian_apply(&xy).unwrap();
        let l_x = g.laplacian_apply(&x).unwrap();
        let ls_y = g.standard_laplacian_apply(&y).unwrap();
        let wrong: f64 = (0..10)
            .map(|v| (l_xy[v] - (l_x[v] * y[v] + x[v] * ls_y[v])).abs())
            .fold(0.0, f64::max);
        assert!(wrong > 1e-6, "correction term must matter");
    }
}
