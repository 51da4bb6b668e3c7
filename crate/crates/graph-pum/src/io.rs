//! Graph and signal ingestion: whitespace edge lists and MatrixMarket
//! coordinate files (1-based labels, `#` / `%` comments), two-column signal
//! CSVs, and the cover CSV export.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::graph::{Graph, LaplacianKind, MetricKind};
use crate::partition::Cover;

fn io_err(path: &Path, source: std::io::Error) -> Error {
    Error::Io {
        path: path.display().to_string(),
        source,
    }
}

fn parse_err(path: &Path, line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.display().to_string(),
        line,
        message: message.into(),
    }
}

/// Vertex count inferred from the largest label, plus 0-based weighted
/// edges.
pub type ParsedEdges = (usize, Vec<(usize, usize, f64)>);

/// Parses a plain edge list: one `i i' weight` triple per line (the weight
/// may be omitted and defaults to 1), 1-based vertex labels, `#` comments.
pub fn parse_edge_list(path: &Path, text: &str) -> Result<ParsedEdges> {
    let mut edges = Vec::new();
    let mut max_label = 0usize;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 2 && fields.len() != 3 {
            return Err(parse_err(
                path,
                lineno + 1,
                format!("expected `i i' [weight]`, found {} fields", fields.len()),
            ));
        }
        let u: usize = fields[0]
            .parse()
            .map_err(|_| parse_err(path, lineno + 1, "bad vertex label"))?;
        let v: usize = fields[1]
            .parse()
            .map_err(|_| parse_err(path, lineno + 1, "bad vertex label"))?;
        let w: f64 = if fields.len() == 3 {
            fields[2]
                .parse()
                .map_err(|_| parse_err(path, lineno + 1, "bad edge weight"))?
        } else {
            1.0
        };
        if u == 0 || v == 0 {
            return Err(parse_err(path, lineno + 1, "labels are 1-based"));
        }
        max_label = max_label.max(u).max(v);
        edges.push((u - 1, v - 1, w));
    }
    Ok((max_label, edges))
}

/// Parses a MatrixMarket coordinate file as an adjacency description.
/// Symmetric and pattern qualifiers are handled; for `general` files each
/// undirected edge may appear in both orientations with equal weights.
pub fn parse_matrix_market(path: &Path, text: &str) -> Result<ParsedEdges> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| parse_err(path, 1, "empty file"))?;
    let header_lc = header.to_lowercase();
    if !header_lc.starts_with("%%matrixmarket") {
        return Err(parse_err(path, 1, "missing %%MatrixMarket header"));
    }
    if !header_lc.contains("coordinate") {
        return Err(parse_err(path, 1, "only coordinate format is supported"));
    }
    let pattern = header_lc.contains("pattern");
    let symmetric = header_lc.contains("symmetric");

    let mut size_line = None;
    for (lineno, raw) in lines.by_ref() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('%') {
            continue;
        }
        size_line = Some((lineno, line.to_string()));
        break;
    }
    let (size_lineno, size_line) =
        size_line.ok_or_else(|| parse_err(path, 1, "missing size line"))?;
    let dims: Vec<usize> = size_line
        .split_whitespace()
        .map(|f| f.parse::<usize>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| parse_err(path, size_lineno + 1, "bad size line"))?;
    if dims.len() != 3 || dims[0] != dims[1] {
        return Err(parse_err(
            path,
            size_lineno + 1,
            "expected square `rows cols nnz`",
        ));
    }
    let n = dims[0];

    let mut seen = std::collections::HashMap::new();
    for (lineno, raw) in lines {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('%') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let expected = if pattern { 2 } else { 3 };
        if fields.len() < expected {
            return Err(parse_err(path, lineno + 1, "short entry line"));
        }
        let i: usize = fields[0]
            .parse()
            .map_err(|_| parse_err(path, lineno + 1, "bad row index"))?;
        let j: usize = fields[1]
            .parse()
            .map_err(|_| parse_err(path, lineno + 1, "bad column index"))?;
        let w: f64 = if pattern {
            1.0
        } else {
            fields[2]
                .parse()
                .map_err(|_| parse_err(path, lineno + 1, "bad value"))?
        };
        if i == 0 || j == 0 || i > n || j > n {
            return Err(parse_err(path, lineno + 1, "index out of range"));
        }
        if i == j {
            return Err(parse_err(path, lineno + 1, "self-loop entry"));
        }
        if w == 0.0 {
            continue;
        }
        let key = (i.min(j) - 1, i.max(j) - 1);
        match seen.entry(key) {
            std::collections::hash_map::Entry::Vacant(e) => {
                e.insert(w);
            }
            std::collections::hash_map::Entry::Occupied(e) => {
                if symmetric {
                    return Err(parse_err(
                        path,
                        lineno + 1,
                        "duplicate entry in symmetric file",
                    ));
                }
                if (e.get() - w).abs() > 1e-12 * w.abs().max(1.0) {
                    return Err(parse_err(
                        path,
                        lineno + 1,
                        "asymmetric weights for an undirected edge",
                    ));
                }
            }
        }
    }
    let mut edges: Vec<(usize, usize, f64)> =
        seen.into_iter().map(|((u, v), w)| (u, v, w)).collect();
    edges.sort_by_key(|&(u, v, _)| (u, v));
    Ok((n, edges))
}

/// Loads a graph file, picking the parser from the extension (`.mtx` /
/// `.mm` are MatrixMarket, anything else a plain edge list). Vertex labels
/// in the file are 1-based and kept as external labels.
pub fn load_graph(path: &Path, kind: LaplacianKind, metric: MetricKind) -> Result<Graph> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let ext = path
        .extension()
        .and_then(|e| e.to_str())
        .unwrap_or("")
        .to_lowercase();
    let (n, edges) = if ext == "mtx" || ext == "mm" {
        parse_matrix_market(path, &text)?
    } else {
        parse_edge_list(path, &text)?
    };
    let labels = (1..=n).map(|v| v.to_string()).collect();
    Graph::build(n, &edges, kind, metric)?.with_labels(labels)
}

/// Loads a `vertex,value` CSV signal (1-based vertices, optional header).
/// Every vertex must receive exactly one value.
pub fn load_signal_csv(path: &Path, n: usize) -> Result<crate::graph::Signal> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let mut values = vec![f64::NAN; n];
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 2 {
            return Err(parse_err(path, lineno + 1, "expected `vertex,value`"));
        }
        if lineno == 0 && fields[0].parse::<usize>().is_err() {
            continue; // header row
        }
        let v: usize = fields[0]
            .parse()
            .map_err(|_| parse_err(path, lineno + 1, "bad vertex"))?;
        let x: f64 = fields[1]
            .parse()
            .map_err(|_| parse_err(path, lineno + 1, "bad value"))?;
        if v == 0 || v > n {
            return Err(parse_err(path, lineno + 1, "vertex out of range"));
        }
        if !x.is_finite() {
            return Err(Error::NonFiniteSample(v - 1));
        }
        values[v - 1] = x;
    }
    if let Some(missing) = values.iter().position(|v| v.is_nan()) {
        return Err(parse_err(
            path,
            0,
            format!("no value for vertex {}", missing + 1),
        ));
    }
    Ok(crate::graph::Signal::from_vec(values))
}

/// Renders a cover as CSV rows `vertex,cluster,subdomains` where the last
/// column is a bitmask of subdomain membership (bit `j` set when the vertex
/// lies in subdomain `j`). At most 64 subdomains fit the mask.
pub fn cover_to_csv(cover: &Cover) -> Result<String> {
    if cover.num_subdomains() > 64 {
        return Err(Error::InvalidConfig(
            "subdomain bitmask export supports at most 64 subdomains".into(),
        ));
    }
    let mut cluster_of = vec![0usize; cover.n()];
    for (j, cluster) in cover.clusters.iter().enumerate() {
        for &v in cluster {
            cluster_of[v] = j;
        }
    }
    let mut mask = vec![0u64; cover.n()];
    for (j, dom) in cover.subdomains.iter().enumerate() {
        for &v in dom {
            mask[v] |= 1 << j;
        }
    }
    let mut out = String::from("vertex,cluster,subdomains\n");
    for v in 0..cover.n() {
        out.push_str(&format!("{},{},{}\n", v + 1, cluster_of[v], mask[v]));
    }
    Ok(out)
}
