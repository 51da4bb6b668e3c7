//! Deterministic synthetic graphs and signals used by the test suites, the
//! `verify` command and offline benchmarks: paths, cycles, 2-D grids, random
//! connected graphs and road-network-like random geometric graphs.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::graph::{Graph, LaplacianKind, MetricKind, Signal};

pub fn path_graph(n: usize, kind: LaplacianKind) -> Graph {
    let edges: Vec<_> = (0..n - 1).map(|i| (i, i + 1, 1.0)).collect();
    Graph::build(n, &edges, kind, MetricKind::ShortestPathHops).expect("path graph is valid")
}

pub fn cycle_graph(n: usize, kind: LaplacianKind) -> Graph {
    let mut edges: Vec<_> = (0..n - 1).map(|i| (i, i + 1, 1.0)).collect();
    edges.push((0, n - 1, 1.0));
    Graph::build(n, &edges, kind, MetricKind::ShortestPathHops).expect("cycle graph is valid")
}

/// Axis-aligned grid with unit weights, `rows * cols` vertices.
pub fn grid_graph(rows: usize, cols: usize, kind: LaplacianKind) -> Graph {
    let idx = |r: usize, c: usize| r * cols + c;
    let mut edges = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            if c + 1 < cols {
                edges.push((idx(r, c), idx(r, c + 1), 1.0));
            }
            if r + 1 < rows {
                edges.push((idx(r, c), idx(r + 1, c), 1.0));
            }
        }
    }
    Graph::build(rows * cols, &edges, kind, MetricKind::ShortestPathHops)
        .expect("grid graph is valid")
}

/// Random connected graph: a random spanning tree plus `extra_edges`
/// additional random edges. Weights are unit when `unit_weights`, otherwise
/// drawn uniformly from `[0.2, 2.0)`.
pub fn random_connected_graph(
    n: usize,
    extra_edges: usize,
    unit_weights: bool,
    seed: u64,
    kind: LaplacianKind,
    metric: MetricKind,
) -> Graph {
    assert!(n >= 2, "need at least two vertices");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let weight = |rng: &mut ChaCha8Rng| {
        if unit_weights {
            1.0
        } else {
            rng.gen_range(0.2..2.0)
        }
    };
    let mut present = std::collections::HashSet::new();
    let mut edges = Vec::new();
    for v in 1..n {
        let u = rng.gen_range(0..v);
        present.insert((u, v));
        let w = weight(&mut rng);
        edges.push((u, v, w));
    }
    let mut attempts = 0;
    let mut added = 0;
    while added < extra_edges && attempts < 20 * extra_edges + 100 {
        attempts += 1;
        let u = rng.gen_range(0..n);
        let v = rng.gen_range(0..n);
        if u == v {
            continue;
        }
        let key = (u.min(v), u.max(v));
        if present.insert(key) {
            let w = weight(&mut rng);
            edges.push((key.0, key.1, w));
            added += 1;
        }
    }
    Graph::build(n, &edges, kind, metric).expect("tree plus extra edges is connected")
}

/// Road-network-like fixture: points in the unit square joined within a
/// radius chosen for an average degree near `avg_degree`, trimmed to exactly
/// `n` vertices by keeping the first `n` nodes in breadth-first order from
/// the largest component (which keeps the result connected).
pub fn random_geometric_graph(
    n: usize,
    avg_degree: f64,
    seed: u64,
    kind: LaplacianKind,
    metric: MetricKind,
) -> Result<Graph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // oversample so the giant component comfortably exceeds n
    let m = n + n / 3 + 8;
    let pts: Vec<(f64, f64)> = (0..m)
        .map(|_| (rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0)))
        .collect();
    // expected degree of a unit-square RGG is about pi r^2 (m - 1)
    let radius = (avg_degree / (std::f64::consts::PI * (m as f64 - 1.0))).sqrt();
    let r2 = radius * radius;

    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); m];
    for i in 0..m {
        for j in (i + 1)..m {
            let dx = pts[i].0 - pts[j].0;
            let dy = pts[i].1 - pts[j].1;
            if dx * dx + dy * dy <= r2 {
                adj[i].push(j);
                adj[j].push(i);
            }
        }
    }

    // largest connected component by BFS
    let mut comp = vec![usize::MAX; m];
    let mut comp_sizes = Vec::new();
    for s in 0..m {
        if comp[s] != usize::MAX {
            continue;
        }
        let id = comp_sizes.len();
        let mut size = 0usize;
        let mut queue = std::collections::VecDeque::from([s]);
        comp[s] = id;
        while let Some(u) = queue.pop_front() {
            size += 1;
            for &v in &adj[u] {
                if comp[v] == usize::MAX {
                    comp[v] = id;
                    queue.push_back(v);
                }
            }
        }
        comp_sizes.push(size);
    }
    let (largest, &largest_size) = comp_sizes
        .iter()
        .enumerate()
        .max_by_key(|(_, &s)| s)
        .expect("at least one component");
    if largest_size < n {
        // retry with a denser sample
        return random_geometric_graph(n, avg_degree + 0.5, seed.wrapping_add(1), kind, metric);
    }

    // first n vertices in BFS order from the lowest-index vertex of the
    // largest component form a connected induced subgraph
    let start = (0..m).find(|&v| comp[v] == largest).unwrap();
    let mut order = Vec::with_capacity(n);
    let mut picked = vec![false; m];
    let mut queue = std::collections::VecDeque::from([start]);
    picked[start] = true;
    while let Some(u) = queue.pop_front() {
        order.push(u);
        if order.len() == n {
            break;
        }
        for &v in &adj[u] {
            if !picked[v] {
                picked[v] = true;
                queue.push_back(v);
            }
        }
    }
    let mut new_id = vec![usize::MAX; m];
    for (local, &v) in order.iter().enumerate() {
        new_id[v] = local;
    }
    let mut edges = Vec::new();
    for &u in &order {
        for &v in &adj[u] {
            if new_id[v] != usize::MAX && new_id[u] < new_id[v] {
                edges.push((new_id[u], new_id[v], 1.0));
            }
        }
    }
    Graph::build(n, &edges, kind, metric)
}

/// Uniform random signal in `[-1, 1)`.
pub fn random_signal(n: usize, seed: u64) -> Signal {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Signal::from_vec((0..n).map(|_| rng.gen_range(-1.0..1.0)).collect())
}
