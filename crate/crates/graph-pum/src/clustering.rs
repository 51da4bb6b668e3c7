//! Restricted greedy J-center clustering over the sampling set, fill
//! distance, and an exhaustive optimal-center oracle for small instances.
//!
//! The greedy loop adds the sampling node farthest from the chosen centers
//! (lowest index in the sampling list on ties) and keeps a running
//! min-distance array, so the whole selection costs one distance sweep per
//! center.

use itertools::Itertools;

use crate::error::{Error, Result};
use crate::graph::{Graph, Signal};

/// Ordered center list; every center belongs to the sampling set and the
/// first entry is the caller-supplied start.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CenterSet {
    pub centers: Vec<usize>,
}

impl CenterSet {
    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }
}

/// Disjoint nearest-center clusters covering the vertex set;
/// `assignment[v]` is the cluster index of vertex `v`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Clustering {
    pub clusters: Vec<Vec<usize>>,
    pub assignment: Vec<usize>,
}

fn check_sampling_set(g: &Graph, w: &[usize]) -> Result<()> {
    if w.is_empty() {
        return Err(Error::EmptyNodeSet);
    }
    let mut seen = vec![false; g.n()];
    for &v in w {
        if v >= g.n() {
            return Err(Error::VertexOutOfRange { index: v, n: g.n() });
        }
        if seen[v] {
            return Err(Error::DuplicateSample(v));
        }
        seen[v] = true;
    }
    Ok(())
}

/// Greedy J-center clustering with centers restricted to the sampling list
/// `w`. Returns the ordered centers and the nearest-center clustering of
/// the whole vertex set; ties in both the center selection and the cluster
/// assignment are broken towards the lower index.
pub fn greedy_j_center(
    g: &Graph,
    w: &[usize],
    j: usize,
    start: usize,
) -> Result<(CenterSet, Clustering)> {
    check_sampling_set(g, w)?;
    if !w.contains(&start) {
        return Err(Error::StartNotInW(start));
    }
    if j == 0 || j > w.len() {
        return Err(Error::JTooLarge {
            j,
            available: w.len(),
        });
    }

    let n = g.n();
    let mut centers = Vec::with_capacity(j);
    let mut min_dist = g.distances_from(&[start])?;
    let mut nearest = vec![0usize; n];
    centers.push(start);

    while centers.len() < j {
        // farthest sampling node; earlier entries of `w` win ties
        let mut best = w[0];
        let mut best_d = min_dist[w[0]];
        for &cand in &w[1..] {
            if min_dist[cand] > best_d {
                best = cand;
                best_d = min_dist[cand];
            }
        }
        let idx = centers.len();
        centers.push(best);
        let d_new = g.distances_from(&[best])?;
        for v in 0..n {
            if d_new[v] < min_dist[v] {
                min_dist[v] = d_new[v];
                nearest[v] = idx;
            }
        }
    }

    let mut clusters = vec![Vec::new(); j];
    for (v, &c) in nearest.iter().enumerate() {
        clusters[c].push(v);
    }
    Ok((
        CenterSet { centers },
        Clustering {
            clusters,
            assignment: nearest,
        },
    ))
}

/// Fill distance of a center set: the largest distance from any vertex of
/// `over` to its nearest center.
pub fn fill_distance(g: &Graph, centers: &[usize], over: &[usize]) -> Result<f64> {
    if centers.is_empty() {
        return Err(Error::EmptyCenterSet);
    }
    let d = g.distances_from(centers)?;
    Ok(over.iter().map(|&v| d[v]).fold(0.0, f64::max))
}

/// `fill_distance` over the whole vertex set.
pub fn fill_distance_all(g: &Graph, centers: &[usize]) -> Result<f64> {
    if centers.is_empty() {
        return Err(Error::EmptyCenterSet);
    }
    let d = g.distances_from(centers)?;
    Ok(d.iter().copied().fold(0.0, f64::max))
}

const BRUTE_FORCE_GUARD: u128 = 1_000_000;

fn binomial(n: usize, k: usize) -> u128 {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul((n - i) as u128) / (i as u128 + 1);
    }
    acc
}

/// Exhaustive J-center optimum over the candidate list: the subset of size
/// `j` minimizing the fill distance over all vertices. Guarded against
/// combinatorial blowup; ties resolved by lexicographic candidate order.
pub fn optimal_j_center_bruteforce(
    g: &Graph,
    candidates: &[usize],
    j: usize,
) -> Result<(CenterSet, f64)> {
    check_sampling_set(g, candidates)?;
    if j == 0 || j > candidates.len() {
        return Err(Error::JTooLarge {
            j,
            available: candidates.len(),
        });
    }
    let count = binomial(candidates.len(), j);
    if count > BRUTE_FORCE_GUARD {
        return Err(Error::CombinatorialBlowup(count, BRUTE_FORCE_GUARD));
    }

    let tables: Vec<Signal> = candidates
        .iter()
        .map(|&c| g.distances_from(&[c]))
        .collect::<Result<_>>()?;

    let n = g.n();
    let mut best: Option<(Vec<usize>, f64)> = None;
    for combo in (0..candidates.len()).combinations(j) {
        let mut fill = 0.0f64;
        for v in 0..n {
            let mut nearest = f64::INFINITY;
            for &ci in &combo {
                let d = tables[ci][v];
                if d < nearest {
                    nearest = d;
                }
            }
            if nearest > fill {
                fill = nearest;
                if let Some((_, best_fill)) = &best {
                    if fill >= *best_fill {
                        break;
                    }
                }
            }
        }
        match &best {
            Some((_, best_fill)) if fill >= *best_fill => {}
            _ => best = Some((combo.iter().map(|&ci| candidates[ci]).collect(), fill)),
        }
    }
    let (centers, fill) = best.expect("at least one combination");
    Ok((CenterSet { centers }, fill))
}
