//! Cluster augmentation into overlapping subdomains, Shepard-weight
//! partitions of unity, and the boundary-condition check required by the
//! gradient and Laplacian error bounds.

use crate::clustering::{CenterSet, Clustering};
use crate::error::{Error, Result};
use crate::graph::{Graph, Signal};

/// Overlapping cover of the vertex set: per subdomain the augmented node
/// set, its core cluster, and the shared center list and radius.
#[derive(Debug, Clone)]
pub struct Cover {
    /// Sorted node lists, one per subdomain.
    pub subdomains: Vec<Vec<usize>>,
    /// The disjoint clusters the subdomains grew from.
    pub clusters: Vec<Vec<usize>>,
    pub centers: CenterSet,
    pub radius: f64,
    n: usize,
}

impl Cover {
    pub fn num_subdomains(&self) -> usize {
        self.subdomains.len()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn contains(&self, j: usize, v: usize) -> bool {
        self.subdomains[j].binary_search(&v).is_ok()
    }

    /// Subdomain membership per vertex, as indices into `subdomains`.
    pub fn memberships(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.n];
        for (j, dom) in self.subdomains.iter().enumerate() {
            for &v in dom {
                out[v].push(j);
            }
        }
        out
    }
}

/// Shepard weight family used for the partition of unity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PouKind {
    /// `psi_j = 1` on the subdomain; normalizing spreads a vertex evenly
    /// over every subdomain containing it.
    IndicatorSubdomain,
    /// `psi_j = 1` on the core cluster; the normalization is trivial and
    /// `phi_j` is the cluster indicator.
    IndicatorCluster,
    /// Caller-supplied nonnegative weights supported on the subdomains.
    CustomShepard,
}

/// Nonnegative functions `phi_j` supported on the subdomains and summing to
/// one at every vertex. Values are stored only over each subdomain's node
/// list.
#[derive(Debug, Clone)]
pub struct PartitionOfUnity {
    /// `supports[j]` is the sorted node list of subdomain `j`.
    supports: Vec<Vec<usize>>,
    /// `values[j][k]` is `phi_j(supports[j][k])`.
    values: Vec<Vec<f64>>,
    kind: PouKind,
    n: usize,
}

impl PartitionOfUnity {
    pub fn num_functions(&self) -> usize {
        self.supports.len()
    }

    pub fn kind(&self) -> PouKind {
        self.kind
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn support(&self, j: usize) -> &[usize] {
        &self.supports[j]
    }

    /// Values of `phi_j` over its support, aligned with `support(j)`.
    pub fn support_values(&self, j: usize) -> &[f64] {
        &self.values[j]
    }

    /// `phi_j(v)`, zero off the subdomain.
    pub fn phi(&self, j: usize, v: usize) -> f64 {
        match self.supports[j].binary_search(&v) {
            Ok(k) => self.values[j][k],
            Err(_) => 0.0,
        }
    }

    /// `phi_j` as a full-length signal (zero extended).
    pub fn to_full_signal(&self, j: usize) -> Signal {
        let mut out = vec![0.0; self.n];
        for (k, &v) in self.supports[j].iter().enumerate() {
            out[v] = self.values[j][k];
        }
        Signal::from_vec(out)
    }

    /// Pointwise sum over all functions; equals one everywhere by
    /// construction.
    pub fn sum_signal(&self) -> Signal {
        let mut out = vec![0.0; self.n];
        for (j, dom) in self.supports.iter().enumerate() {
            for (k, &v) in dom.iter().enumerate() {
                out[v] += self.values[j][k];
            }
        }
        Signal::from_vec(out)
    }
}

/// Enlarges a cluster by every vertex within graph distance `r` of it; one
/// multi-source sweep.
pub fn augment_cluster(g: &Graph, cluster: &[usize], r: f64) -> Result<Vec<usize>> {
    if r < 0.0 || r.is_nan() {
        return Err(Error::NegativeRadius(r));
    }
    if cluster.is_empty() {
        return Err(Error::EmptyNodeSet);
    }
    let d = g.distances_from(cluster)?;
    Ok((0..g.n()).filter(|&v| d[v] <= r).collect())
}

/// Builds the overlapping cover by augmenting every cluster with radius
/// `r`, and checks the construction guarantees: clusters stay inside their
/// subdomains, the subdomains cover the vertex set, each subdomain is
/// connected, and every subdomain node is within `h(Q_J) + r` of its
/// center.
pub fn build_cover(
    g: &Graph,
    centers: &CenterSet,
    clustering: &Clustering,
    r: f64,
) -> Result<Cover> {
    let subdomains: Vec<Vec<usize>> = clustering
        .clusters
        .iter()
        .map(|c| augment_cluster(g, c, r))
        .collect::<Result<_>>()?;

    let mut covered = vec![false; g.n()];
    for dom in &subdomains {
        for &v in dom {
            covered[v] = true;
        }
    }
    assert!(covered.iter().all(|&c| c), "subdomains must cover V");

    let h = crate::clustering::fill_distance_all(g, &centers.centers)?;
    for (j, dom) in subdomains.iter().enumerate() {
        for &v in &clustering.clusters[j] {
            debug_assert!(dom.binary_search(&v).is_ok());
        }
        let d = g.distances_from(&[centers.centers[j]])?;
        for &v in dom {
            assert!(
                d[v] <= h + r + 1e-9,
                "subdomain {j} node {v} violates the radius bound"
            );
        }
        // connectivity of the induced subdomain
        g.extract_subgraph(dom)?;
    }

    Ok(Cover {
        subdomains,
        clusters: clustering.clusters.clone(),
        centers: centers.clone(),
        radius: r,
        n: g.n(),
    })
}

/// Shepard partition of unity for the indicator weight families.
pub fn shepard_partition(cover: &Cover, kind: PouKind) -> Result<PartitionOfUnity> {
    match kind {
        PouKind::IndicatorSubdomain => {
            let mut count = vec![0u32; cover.n];
            for dom in &cover.subdomains {
                for &v in dom {
                    count[v] += 1;
                }
            }
            let values = cover
                .subdomains
                .iter()
                .map(|dom| dom.iter().map(|&v| 1.0 / f64::from(count[v])).collect())
                .collect();
            Ok(PartitionOfUnity {
                supports: cover.subdomains.clone(),
                values,
                kind,
                n: cover.n,
            })
        }
        PouKind::IndicatorCluster => {
            let values = cover
                .subdomains
                .iter()
                .zip(&cover.clusters)
                .map(|(dom, cluster)| {
                    let mut in_cluster = vec![false; cover.n];
                    for &v in cluster {
                        in_cluster[v] = true;
                    }
                    dom.iter()
                        .map(|&v| if in_cluster[v] { 1.0 } else { 0.0 })
                        .collect()
                })
                .collect();
            Ok(PartitionOfUnity {
                supports: cover.subdomains.clone(),
                values,
                kind,
                n: cover.n,
            })
        }
        PouKind::CustomShepard => Err(Error::InvalidConfig(
            "custom Shepard weights are built with shepard_partition_custom".into(),
        )),
    }
}

/// Shepard partition of unity from caller-supplied nonnegative weights,
/// one slice per subdomain aligned with the subdomain's node list.
pub fn shepard_partition_custom(cover: &Cover, weights: &[Vec<f64>]) -> Result<PartitionOfUnity> {
    if weights.len() != cover.num_subdomains() {
        return Err(Error::DimensionMismatch {
            expected: cover.num_subdomains(),
            got: weights.len(),
        });
    }
    for (j, (dom, w)) in cover.subdomains.iter().zip(weights).enumerate() {
        if w.len() != dom.len() {
            return Err(Error::DimensionMismatch {
                expected: dom.len(),
                got: w.len(),
            });
        }
        if let Some(k) = w.iter().position(|&x| x < 0.0 || !x.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "weight for subdomain {j} at node {} is not a finite nonnegative value",
                dom[k]
            )));
        }
    }
    let mut total = vec![0.0f64; cover.n];
    for (dom, w) in cover.subdomains.iter().zip(weights) {
        for (k, &v) in dom.iter().enumerate() {
            total[v] += w[k];
        }
    }
    if let Some(v) = (0..cover.n).find(|&v| total[v] <= 0.0) {
        return Err(Error::ZeroTotalWeight(v));
    }
    let values = cover
        .subdomains
        .iter()
        .zip(weights)
        .map(|(dom, w)| {
            dom.iter()
                .enumerate()
                .map(|(k, &v)| w[k] / total[v])
                .collect()
        })
        .collect();
    Ok(PartitionOfUnity {
        supports: cover.subdomains.clone(),
        values,
        kind: PouKind::CustomShepard,
        n: cover.n,
    })
}

/// Per-subdomain outcome of the boundary-condition check: the weighted
/// gradient of `phi_j` must vanish on every edge leaving the subdomain.
#[derive(Debug, Clone)]
pub struct BoundaryReport {
    pub per_subdomain: Vec<SubdomainBoundary>,
}

#[derive(Debug, Clone)]
pub struct SubdomainBoundary {
    pub subdomain: usize,
    pub satisfied: bool,
    /// Offending edges `(inside, outside, gradient value)`.
    pub violations: Vec<(usize, usize, f64)>,
}

impl BoundaryReport {
    pub fn all_satisfied(&self) -> bool {
        self.per_subdomain.iter().all(|s| s.satisfied)
    }
}

/// Checks condition (BC): for every subdomain `j` and every edge with one
/// endpoint inside `V_j` and the other outside, the weighted gradient of
/// `phi_j` on that edge is zero.
pub fn check_boundary_condition(
    g: &Graph,
    cover: &Cover,
    pou: &PartitionOfUnity,
) -> BoundaryReport {
    let mut per_subdomain = Vec::with_capacity(cover.num_subdomains());
    for j in 0..cover.num_subdomains() {
        let mut inside = vec![false; g.n()];
        for &v in &cover.subdomains[j] {
            inside[v] = true;
        }
        let mut violations = Vec::new();
        for e in g.directed_edges() {
            if inside[e.from] && !inside[e.to] {
                // phi_j vanishes outside its support, so the gradient on a
                // boundary edge reduces to sqrt(A) * phi_j(from)
                let grad = e.weight.sqrt() * (pou.phi(j, e.from) - pou.phi(j, e.to));
                if grad != 0.0 {
                    violations.push((e.from, e.to, grad));
                }
            }
        }
        per_subdomain.push(SubdomainBoundary {
            subdomain: j,
            satisfied: violations.is_empty(),
            violations,
        });
    }
    BoundaryReport { per_subdomain }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clustering::greedy_j_center;
    use crate::graph::{LaplacianKind, MetricKind};
    use crate::synthetic::{path_graph, random_connected_graph};

    fn cover_on(g: &Graph, w: &[usize], j: usize, r: f64) -> Cover {
        let (q, c) = greedy_j_center(g, w, j, w[0]).unwrap();
        build_cover(g, &q, &c, r).unwrap()
    }

    #[test]
    fn augmentation_by_hand() {
        let g = path_graph(5, LaplacianKind::Standard);
        assert_eq!(augment_cluster(&g, &[0, 1, 2], 0.0).unwrap(), vec![0, 1, 2]);
        assert_eq!(
            augment_cluster(&g, &[0, 1, 2], 1.0).unwrap(),
            vec![0, 1, 2, 3]
        );
        assert_eq!(
            augment_cluster(&g, &[2], 4.0).unwrap(),
            (0..5).collect::<Vec<_>>()
        );
        assert!(matches!(
            augment_cluster(&g, &[0], -1.0),
            Err(Error::NegativeRadius(_))
        ));
    }

    #[test]
    fn single_subdomain_cover() {
        let g = path_graph(6, LaplacianKind::Standard);
        let w: Vec<usize> = (0..6).collect();
        let cover = cover_on(&g, &w, 1, 0.0);
        assert_eq!(cover.subdomains.len(), 1);
        assert_eq!(cover.subdomains[0], w);
    }

    #[test]
    fn cover_radius_bound_and_monotonicity() {
        for seed in 0..30u64 {
            let n = 15 + (seed as usize % 26);
            let g = random_connected_graph(
                n,
                seed as usize % 10,
                true,
                seed,
                LaplacianKind::Standard,
                MetricKind::ShortestPathHops,
            );
            let w: Vec<usize> = (0..n).step_by(2).collect();
            let j = 2 + (seed as usize % 3).min(w.len() - 2);
            let (q, c) = greedy_j_center(&g, &w, j, w[0]).unwrap();
            let h = crate::clustering::fill_distance_all(&g, &q.centers).unwrap();
            let small = build_cover(&g, &q, &c, 1.0).unwrap();
            let large = build_cover(&g, &q, &c, 2.0).unwrap();
            for jj in 0..j {
                // growing r only adds nodes
                for v in &small.subdomains[jj] {
                    assert!(large.subdomains[jj].binary_search(v).is_ok());
                }
                // Corollary radius bound, checked directly
                let d = g.distances_from(&[q.centers[jj]]).unwrap();
                for &v in &small.subdomains[jj] {
                    assert!(d[v] <= h + 1.0 + 1e-12);
                }
            }
        }
    }

    #[test]
    fn shepard_subdomain_kind_splits_overlap_evenly() {
        let g = path_graph(5, LaplacianKind::Standard);
        let w: Vec<usize> = (0..5).collect();
        let cover = cover_on(&g, &w, 2, 1.0);
        let pou = shepard_partition(&cover, PouKind::IndicatorSubdomain).unwrap();
        let mships = cover.memberships();
        for v in 0..5 {
            if mships[v].len() == 2 {
                for &j in &mships[v] {
                    assert_eq!(pou.phi(j, v), 0.5);
                }
            }
        }
        let sum = pou.sum_signal();
        for v in 0..5 {
            assert!((sum[v] - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn shepard_cluster_kind_is_indicator() {
        let g = path_graph(7, LaplacianKind::Standard);
        let w: Vec<usize> = (0..7).collect();
        let cover = cover_on(&g, &w, 3, 1.0);
        let pou = shepard_partition(&cover, PouKind::IndicatorCluster).unwrap();
        for j in 0..3 {
            for &v in pou.support(j) {
                let val = pou.phi(j, v);
                assert!(val == 0.0 || val == 1.0);
                let in_cluster = cover.clusters[j].contains(&v);
                assert_eq!(val == 1.0, in_cluster);
            }
        }
        let sum = pou.sum_signal();
        for v in 0..7 {
            assert_eq!(sum[v], 1.0);
        }
    }

    #[test]
    fn custom_shepard_normalizes_and_rejects_zero_total() {
        let g = path_graph(5, LaplacianKind::Standard);
        let w: Vec<usize> = (0..5).collect();
        let cover = cover_on(&g, &w, 2, 1.0);
        let weights: Vec<Vec<f64>> = cover
            .subdomains
            .iter()
            .enumerate()
            .map(|(j, dom)| dom.iter().map(|_| (j + 1) as f64).collect())
            .collect();
        let pou = shepard_partition_custom(&cover, &weights).unwrap();
        let sum = pou.sum_signal();
        for v in 0..5 {
            assert!((sum[v] - 1.0).abs() < 1e-12);
        }
        let zeroed: Vec<Vec<f64>> = cover
            .subdomains
            .iter()
            .map(|dom| vec![0.0; dom.len()])
            .collect();
        assert!(matches!(
            shepard_partition_custom(&cover, &zeroed),
            Err(Error::ZeroTotalWeight(_))
        ));
    }

    #[test]
    fn boundary_condition_cluster_kind_with_overlap() {
        for seed in 0..20u64 {
            let n = 12 + (seed as usize % 20);
            let g = random_connected_graph(
                n,
                seed as usize % 8,
                true,
                40 + seed,
                LaplacianKind::Standard,
                MetricKind::ShortestPathHops,
            );
            let w: Vec<usize> = (0..n).collect();
            let cover = cover_on(&g, &w, 3, 1.0);
            let pou = shepard_partition(&cover, PouKind::IndicatorCluster).unwrap();
            let report = check_boundary_condition(&g, &cover, &pou);
            assert!(report.all_satisfied(), "seed {seed} violated (BC)");
        }
    }

    #[test]
    fn boundary_condition_violations_detected() {
        let g = path_graph(8, LaplacianKind::Standard);
        let w: Vec<usize> = (0..8).collect();

        // subdomain indicators jump at the boundary once subdomains overlap
        let cover = cover_on(&g, &w, 2, 1.0);
        let pou = shepard_partition(&cover, PouKind::IndicatorSubdomain).unwrap();
        let report = check_boundary_condition(&g, &cover, &pou);
        assert!(!report.all_satisfied());
        assert!(report
            .per_subdomain
            .iter()
            .any(|s| !s.violations.is_empty()));

        // with r = 0 the cluster indicator jumps across the cut
        let bare = cover_on(&g, &w, 2, 0.0);
        let pou0 = shepard_partition(&bare, PouKind::IndicatorCluster).unwrap();
        assert!(!check_boundary_condition(&g, &bare, &pou0).all_satisfied());
    }
}
