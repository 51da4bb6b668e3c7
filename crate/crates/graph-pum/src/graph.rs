//! Graph data model: weighted undirected graphs carrying a symmetric
//! Laplacian and a shortest-path metric, plus signals on vertices, functions
//! on directed edges, the weighted gradient and the node/edge/hybrid norms.

use std::cmp::Ordering;
use std::collections::VecDeque;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Which matrix sits on the graph: `L_A = -A`, `L_S = D - A`,
/// `L_N = D^{-1/2} L_S D^{-1/2}`, or a user-supplied symmetric matrix with
/// the adjacency sign pattern and a free diagonal.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LaplacianKind {
    NegativeAdjacency,
    Standard,
    Normalized,
    Custom,
}

/// Distance metric on the vertex set: hop counts (breadth-first search) or
/// weighted shortest paths (Dijkstra over the input edge lengths).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MetricKind {
    ShortestPathHops,
    ShortestPathWeighted,
}

#[derive(Debug, Clone, Copy)]
struct Neighbor {
    to: usize,
    /// Adjacency weight recovered from the Laplacian, `a = -L[i,j]`.
    a: f64,
    /// Metric length of the edge (the input weight, before any
    /// normalization applied to the Laplacian).
    len: f64,
}

/// A directed edge `(from, to)` with its adjacency weight and its position
/// in the directed-edge enumeration used by [`EdgeFunction`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirectedEdge {
    pub index: usize,
    pub from: usize,
    pub to: usize,
    pub weight: f64,
}

/// Connected weighted undirected graph: the quadruplet of vertex set, edge
/// set, symmetric Laplacian and metric. Immutable after construction.
#[derive(Debug, Clone)]
pub struct Graph {
    n: usize,
    adj: Vec<Vec<Neighbor>>,
    /// Prefix sums of out-degrees; directed edge `(i, adj[i][k])` has index
    /// `edge_offsets[i] + k`.
    edge_offsets: Vec<usize>,
    laplacian: DMatrix<f64>,
    kind: LaplacianKind,
    metric: MetricKind,
    labels: Option<Vec<String>>,
}

/// Real-valued function on the vertices, stored as a dense vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Signal(DVector<f64>);

impl Signal {
    pub fn new(values: DVector<f64>) -> Self {
        Signal(values)
    }

    pub fn from_vec(values: Vec<f64>) -> Self {
        Signal(DVector::from_vec(values))
    }

    pub fn zeros(n: usize) -> Self {
        Signal(DVector::zeros(n))
    }

    pub fn constant(n: usize, c: f64) -> Self {
        Signal(DVector::from_element(n, c))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.len() == 0
    }

    pub fn values(&self) -> &DVector<f64> {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = &f64> {
        self.0.iter()
    }

    pub fn norm2(&self) -> f64 {
        self.0.norm()
    }

    pub fn dot(&self, other: &Signal) -> f64 {
        self.0.dot(&other.0)
    }

    /// Restriction to a node subset, in the order given.
    pub fn restrict(&self, nodes: &[usize]) -> Signal {
        Signal(DVector::from_iterator(
            nodes.len(),
            nodes.iter().map(|&v| self.0[v]),
        ))
    }

    /// Zero-extension of a local signal back onto `n` vertices: value `i`
    /// lands on vertex `nodes[i]`, everything else is zero.
    pub fn zero_extended(&self, nodes: &[usize], n: usize) -> Signal {
        let mut out = DVector::zeros(n);
        for (local, &global) in nodes.iter().enumerate() {
            out[global] = self.0[local];
        }
        Signal(out)
    }
}

impl std::ops::Index<usize> for Signal {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl std::ops::IndexMut<usize> for Signal {
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        &mut self.0[i]
    }
}

impl std::ops::Sub for &Signal {
    type Output = Signal;
    fn sub(self, rhs: &Signal) -> Signal {
        Signal(&self.0 - &rhs.0)
    }
}

impl std::ops::Add for &Signal {
    type Output = Signal;
    fn add(self, rhs: &Signal) -> Signal {
        Signal(&self.0 + &rhs.0)
    }
}

impl std::ops::Mul<f64> for &Signal {
    type Output = Signal;
    fn mul(self, rhs: f64) -> Signal {
        Signal(&self.0 * rhs)
    }
}

/// Real-valued function on the directed edge set, indexed by the graph's
/// directed-edge enumeration (both orientations of every undirected edge).
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeFunction {
    values: Vec<f64>,
}

impl EdgeFunction {
    pub fn zeros(num_directed_edges: usize) -> Self {
        EdgeFunction {
            values: vec![0.0; num_directed_edges],
        }
    }

    pub fn from_vec(values: Vec<f64>) -> Self {
        EdgeFunction { values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Plain euclidean dot product over the directed-edge enumeration.
    pub fn dot(&self, other: &EdgeFunction) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b)
            .sum()
    }
}

impl std::ops::Index<usize> for EdgeFunction {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.values[i]
    }
}

impl std::ops::Sub for &EdgeFunction {
    type Output = EdgeFunction;
    fn sub(self, rhs: &EdgeFunction) -> EdgeFunction {
        EdgeFunction {
            values: self
                .values
                .iter()
                .zip(&rhs.values)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

/// Induced subgraph together with the map from local to parent indices.
#[derive(Debug, Clone)]
pub struct Subgraph {
    pub graph: Graph,
    /// `nodes[local] = parent vertex`, ascending.
    pub nodes: Vec<usize>,
}

impl Subgraph {
    /// Local index of a parent vertex, if it belongs to the subgraph.
    pub fn local_index(&self, parent_vertex: usize) -> Option<usize> {
        self.nodes.binary_search(&parent_vertex).ok()
    }
}

impl Graph {
    /// Builds a graph from an undirected edge list (0-based endpoints).
    ///
    /// Weights must be positive, self-loops are rejected, the result must be
    /// connected. `kind` selects how the Laplacian is assembled from the
    /// adjacency; `Custom` graphs are built with [`Graph::from_laplacian`]
    /// instead.
    pub fn build(
        n: usize,
        edges: &[(usize, usize, f64)],
        kind: LaplacianKind,
        metric: MetricKind,
    ) -> Result<Graph> {
        if kind == LaplacianKind::Custom {
            return Err(Error::InvalidConfig(
                "custom Laplacians are constructed with Graph::from_laplacian".into(),
            ));
        }
        let mut adj: Vec<Vec<Neighbor>> = vec![Vec::new(); n];
        for &(u, v, w) in edges {
            if u >= n || v >= n {
                return Err(Error::VertexOutOfRange {
                    index: u.max(v),
                    n,
                });
            }
            if u == v {
                return Err(Error::SelfLoop(u));
            }
            if !(w > 0.0) || !w.is_finite() {
                return Err(Error::NonpositiveWeight(u, v, w));
            }
            adj[u].push(Neighbor { to: v, a: w, len: w });
            adj[v].push(Neighbor { to: u, a: w, len: w });
        }
        for (u, list) in adj.iter_mut().enumerate() {
            list.sort_by_key(|nb| nb.to);
            if list.windows(2).any(|p| p[0].to == p[1].to) {
                return Err(Error::InvalidConfig(format!(
                    "duplicate edge incident to vertex {u}"
                )));
            }
        }

        let degrees: Vec<f64> = adj
            .iter()
            .map(|list| list.iter().map(|nb| nb.a).sum())
            .collect();

        let mut laplacian = DMatrix::<f64>::zeros(n, n);
        match kind {
            LaplacianKind::NegativeAdjacency => {
                for (u, list) in adj.iter().enumerate() {
                    for nb in list {
                        laplacian[(u, nb.to)] = -nb.a;
                    }
                }
            }
            LaplacianKind::Standard => {
                for (u, list) in adj.iter().enumerate() {
                    laplacian[(u, u)] = degrees[u];
                    for nb in list {
                        laplacian[(u, nb.to)] = -nb.a;
                    }
                }
            }
            LaplacianKind::Normalized => {
                for (u, list) in adj.iter().enumerate() {
                    laplacian[(u, u)] = 1.0;
                    for nb in list {
                        laplacian[(u, nb.to)] = -nb.a / (degrees[u] * degrees[nb.to]).sqrt();
                    }
                }
            }
            LaplacianKind::Custom => unreachable!(),
        }

        // The adjacency of the quadruplet is recovered from the Laplacian,
        // so normalization rescales it; metric lengths keep the input weights.
        if kind == LaplacianKind::Normalized {
            for (u, list) in adj.iter_mut().enumerate() {
                for nb in list.iter_mut() {
                    nb.a = -laplacian[(u, nb.to)];
                }
            }
        }

        let g = Graph::assemble(n, adj, laplacian, kind, metric, None)?;
        Ok(g)
    }

    /// Wraps a symmetric matrix with the required off-diagonal sign pattern
    /// (negative exactly on edges) as a `Custom`-kind graph. The diagonal is
    /// unconstrained; metric lengths are taken from the off-diagonals.
    pub fn from_laplacian(laplacian: DMatrix<f64>, metric: MetricKind) -> Result<Graph> {
        let n = laplacian.nrows();
        if laplacian.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: laplacian.ncols(),
            });
        }
        let mut adj: Vec<Vec<Neighbor>> = vec![Vec::new(); n];
        for i in 0..n {
            for j in (i + 1)..n {
                let lij = laplacian[(i, j)];
                if lij != laplacian[(j, i)] {
                    return Err(Error::NonSymmetric(i, j));
                }
                if lij > 0.0 || !lij.is_finite() {
                    return Err(Error::InvalidSignPattern(i, j, lij));
                }
                if lij < 0.0 {
                    let a = -lij;
                    adj[i].push(Neighbor { to: j, a, len: a });
                    adj[j].push(Neighbor { to: i, a, len: a });
                }
            }
        }
        Graph::assemble(n, adj, laplacian, LaplacianKind::Custom, metric, None)
    }

    fn assemble(
        n: usize,
        adj: Vec<Vec<Neighbor>>,
        laplacian: DMatrix<f64>,
        kind: LaplacianKind,
        metric: MetricKind,
        labels: Option<Vec<String>>,
    ) -> Result<Graph> {
        let mut edge_offsets = Vec::with_capacity(n + 1);
        let mut total = 0usize;
        for list in &adj {
            edge_offsets.push(total);
            total += list.len();
        }
        edge_offsets.push(total);
        let g = Graph {
            n,
            adj,
            edge_offsets,
            laplacian,
            kind,
            metric,
            labels,
        };
        let unreachable = g.count_unreachable();
        if unreachable > 0 {
            return Err(Error::DisconnectedGraph(unreachable));
        }
        Ok(g)
    }

    fn count_unreachable(&self) -> usize {
        if self.n == 0 {
            return 0;
        }
        let mut seen = vec![false; self.n];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        let mut reached = 1;
        while let Some(u) = queue.pop_front() {
            for nb in &self.adj[u] {
                if !seen[nb.to] {
                    seen[nb.to] = true;
                    reached += 1;
                    queue.push_back(nb.to);
                }
            }
        }
        self.n - reached
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Graph> {
        if labels.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: labels.len(),
            });
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of undirected edges.
    pub fn num_edges(&self) -> usize {
        self.edge_offsets[self.n] / 2
    }

    /// Number of directed edges (both orientations).
    pub fn num_directed_edges(&self) -> usize {
        self.edge_offsets[self.n]
    }

    pub fn kind(&self) -> LaplacianKind {
        self.kind
    }

    pub fn metric(&self) -> MetricKind {
        self.metric
    }

    pub fn laplacian(&self) -> &DMatrix<f64> {
        &self.laplacian
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// External label of a vertex; falls back to the 1-based index.
    pub fn label(&self, v: usize) -> String {
        match &self.labels {
            Some(l) => l[v].clone(),
            None => (v + 1).to_string(),
        }
    }

    /// Adjacency weight `A[u,v] = -L[u,v]`, zero for non-adjacent pairs.
    pub fn adjacency(&self, u: usize, v: usize) -> f64 {
        self.adj[u]
            .binary_search_by_key(&v, |nb| nb.to)
            .map(|k| self.adj[u][k].a)
            .unwrap_or(0.0)
    }

    pub fn is_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].binary_search_by_key(&v, |nb| nb.to).is_ok()
    }

    /// Weighted degree `D[u,u] = sum_v A[u,v]`.
    pub fn degree(&self, u: usize) -> f64 {
        self.adj[u].iter().map(|nb| nb.a).sum()
    }

    pub fn neighbors(&self, u: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.adj[u].iter().map(|nb| (nb.to, nb.a))
    }

    pub fn directed_edges(&self) -> impl Iterator<Item = DirectedEdge> + '_ {
        self.adj.iter().enumerate().flat_map(move |(u, list)| {
            let base = self.edge_offsets[u];
            list.iter().enumerate().map(move |(k, nb)| DirectedEdge {
                index: base + k,
                from: u,
                to: nb.to,
                weight: nb.a,
            })
        })
    }

    /// Index of the directed edge `(u, v)` in the edge enumeration.
    pub fn directed_edge_index(&self, u: usize, v: usize) -> Option<usize> {
        self.adj[u]
            .binary_search_by_key(&v, |nb| nb.to)
            .map(|k| self.edge_offsets[u] + k)
            .ok()
    }

    /// Shortest-path distance between two vertices under the graph metric.
    pub fn distance(&self, u: usize, v: usize) -> Result<f64> {
        let d = self.distances_from(&[u])?;
        Ok(d[v])
    }

    /// Distances from a source set: per vertex, the minimum distance to any
    /// source. One breadth-first (hops) or Dijkstra (weighted) sweep.
    pub fn distances_from(&self, sources: &[usize]) -> Result<Signal> {
        if sources.is_empty() {
            return Err(Error::EmptyNodeSet);
        }
        for &s in sources {
            if s >= self.n {
                return Err(Error::VertexOutOfRange { index: s, n: self.n });
            }
        }
        match self.metric {
            MetricKind::ShortestPathHops => Ok(self.bfs_multi(sources)),
            MetricKind::ShortestPathWeighted => Ok(self.dijkstra_multi(sources)),
        }
    }

    fn bfs_multi(&self, sources: &[usize]) -> Signal {
        let mut dist = vec![f64::INFINITY; self.n];
        let mut queue = VecDeque::new();
        for &s in sources {
            if dist[s].is_infinite() {
                dist[s] = 0.0;
                queue.push_back(s);
            }
        }
        while let Some(u) = queue.pop_front() {
            let du = dist[u];
            for nb in &self.adj[u] {
                if dist[nb.to].is_infinite() {
                    dist[nb.to] = du + 1.0;
                    queue.push_back(nb.to);
                }
            }
        }
        Signal::from_vec(dist)
    }

    fn dijkstra_multi(&self, sources: &[usize]) -> Signal {
        #[derive(PartialEq)]
        struct Entry(f64, usize);
        impl Eq for Entry {}
        impl PartialOrd for Entry {
            fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
                Some(self.cmp(other))
            }
        }
        impl Ord for Entry {
            fn cmp(&self, other: &Self) -> Ordering {
                // min-heap on distance, ties on vertex index
                other
                    .0
                    .partial_cmp(&self.0)
                    .unwrap_or(Ordering::Equal)
                    .then_with(|| other.1.cmp(&self.1))
            }
        }
        let mut dist = vec![f64::INFINITY; self.n];
        let mut heap = std::collections::BinaryHeap::new();
        for &s in sources {
            if dist[s] > 0.0 {
                dist[s] = 0.0;
                heap.push(Entry(0.0, s));
            }
        }
        while let Some(Entry(d, u)) = heap.pop() {
            if d > dist[u] {
                continue;
            }
            for nb in &self.adj[u] {
                let cand = d + nb.len;
                if cand < dist[nb.to] {
                    dist[nb.to] = cand;
                    heap.push(Entry(cand, nb.to));
                }
            }
        }
        Signal::from_vec(dist)
    }

    /// Largest shortest-path distance from `v` to any vertex.
    pub fn eccentricity(&self, v: usize) -> Result<f64> {
        let d = self.distances_from(&[v])?;
        Ok(d.iter().copied().fold(0.0, f64::max))
    }

    /// Weighted gradient: per directed edge `(i, i')`,
    /// `sqrt(A[i,i']) * (x(i) - x(i'))`.
    pub fn gradient(&self, x: &Signal) -> Result<EdgeFunction> {
        self.check_len(x)?;
        let mut values = Vec::with_capacity(self.num_directed_edges());
        for (u, list) in self.adj.iter().enumerate() {
            for nb in list {
                values.push(nb.a.sqrt() * (x[u] - x[nb.to]));
            }
        }
        Ok(EdgeFunction { values })
    }

    /// Matrix-vector product `L x` by edge iteration plus the diagonal.
    pub fn laplacian_apply(&self, x: &Signal) -> Result<Signal> {
        self.check_len(x)?;
        let mut out = DVector::zeros(self.n);
        for (u, list) in self.adj.iter().enumerate() {
            let mut acc = self.laplacian[(u, u)] * x[u];
            for nb in list {
                acc -= nb.a * x[nb.to];
            }
            out[u] = acc;
        }
        Ok(Signal(out))
    }

    /// Product `L_S x` with the standard Laplacian derived from this graph's
    /// adjacency, regardless of the stored kind.
    pub fn standard_laplacian_apply(&self, x: &Signal) -> Result<Signal> {
        self.check_len(x)?;
        let mut out = DVector::zeros(self.n);
        for (u, list) in self.adj.iter().enumerate() {
            let mut acc = 0.0;
            for nb in list {
                acc += nb.a * (x[u] - x[nb.to]);
            }
            out[u] = acc;
        }
        Ok(Signal(out))
    }

    fn check_len(&self, x: &Signal) -> Result<()> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: x.len(),
            });
        }
        Ok(())
    }

    /// Induced subgraph on a node set. The local Laplacian is the principal
    /// submatrix of `L` on the (sorted, deduplicated) nodes; the result must
    /// be connected. The extraction keeps the parent's kind only when every
    /// vertex is retained; a proper principal submatrix has a free diagonal
    /// and is tagged `Custom`.
    pub fn extract_subgraph(&self, nodes: &[usize]) -> Result<Subgraph> {
        if nodes.is_empty() {
            return Err(Error::EmptyNodeSet);
        }
        let mut sorted: Vec<usize> = nodes.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        if *sorted.last().unwrap() >= self.n {
            return Err(Error::VertexOutOfRange {
                index: *sorted.last().unwrap(),
                n: self.n,
            });
        }
        let mut local_of = vec![usize::MAX; self.n];
        for (local, &v) in sorted.iter().enumerate() {
            local_of[v] = local;
        }

        let m = sorted.len();
        let mut laplacian = DMatrix::<f64>::zeros(m, m);
        let mut adj: Vec<Vec<Neighbor>> = vec![Vec::new(); m];
        for (li, &gi) in sorted.iter().enumerate() {
            laplacian[(li, li)] = self.laplacian[(gi, gi)];
            for nb in &self.adj[gi] {
                let lj = local_of[nb.to];
                if lj != usize::MAX {
                    laplacian[(li, lj)] = self.laplacian[(gi, nb.to)];
                    adj[li].push(Neighbor {
                        to: lj,
                        a: nb.a,
                        len: nb.len,
                    });
                }
            }
        }
        // parent adjacency is neighbor-sorted, so local lists stay sorted
        let kind = if m == self.n {
            self.kind
        } else {
            LaplacianKind::Custom
        };
        let labels = self
            .labels
            .as_ref()
            .map(|l| sorted.iter().map(|&v| l[v].clone()).collect());
        match Graph::assemble(m, adj, laplacian, kind, self.metric, labels) {
            Ok(graph) => Ok(Subgraph {
                graph,
                nodes: sorted,
            }),
            Err(Error::DisconnectedGraph(_)) => Err(Error::DisconnectedSubgraph),
            Err(e) => Err(e),
        }
    }
}

fn validate_p(p: f64) -> Result<()> {
    if p.is_nan() || p < 1.0 {
        return Err(Error::InvalidP(p));
    }
    Ok(())
}

/// Exponent dual to `p`: `1/p + 1/q = 1`.
pub fn dual_exponent(p: f64) -> f64 {
    if p == 1.0 {
        f64::INFINITY
    } else if p.is_infinite() {
        1.0
    } else {
        p / (p - 1.0)
    }
}

fn lp(values: impl Iterator<Item = f64>, p: f64) -> f64 {
    if p.is_infinite() {
        values.fold(0.0, |m, v| m.max(v.abs()))
    } else {
        values.map(|v| v.abs().powf(p)).sum::<f64>().powf(1.0 / p)
    }
}

/// `L^p` norm of a vertex signal, `max` for `p = inf`.
pub fn node_norm(x: &Signal, p: f64) -> Result<f64> {
    validate_p(p)?;
    Ok(lp(x.iter().copied(), p))
}

/// `L^p` norm of an edge function, summed over the directed edge set (both
/// orientations of every undirected edge).
pub fn edge_norm(z: &EdgeFunction, p: f64) -> Result<f64> {
    validate_p(p)?;
    Ok(lp(z.values.iter().copied(), p))
}

/// Hybrid norm: per vertex the `L^p` aggregate over its outgoing directed
/// edges, then the maximum over vertices. Coincides with the edge sup-norm
/// for `p = inf`.
pub fn hybrid_norm(g: &Graph, z: &EdgeFunction, p: f64) -> Result<f64> {
    validate_p(p)?;
    if z.len() != g.num_directed_edges() {
        return Err(Error::DimensionMismatch {
            expected: g.num_directed_edges(),
            got: z.len(),
        });
    }
    let mut best = 0.0f64;
    for u in 0..g.n() {
        let range = g.edge_offsets[u]..g.edge_offsets[u + 1];
        let local = lp(z.values[range].iter().copied(), p);
        best = best.max(local);
    }
    Ok(best)
}
