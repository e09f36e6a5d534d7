//! Weighted undirected graphs, their normalized Laplacians, and the
//! indicator / pair-indicator vertex functions used as signature inputs.

use std::collections::HashSet;
use std::fmt::Write as _;

use ndarray::Array2;

use crate::error::{Error, Result};

/// Simple undirected graph with strictly positive edge weights.
///
/// Vertices are `0..n`. Self-loops and duplicate unordered pairs are rejected
/// at construction, so every `Graph` is valid by the time it exists.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize, f64)>,
}

impl Graph {
    /// Builds a graph on `n` vertices from an edge list `(i, j, w)`.
    pub fn new(n: usize, edges: Vec<(usize, usize, f64)>) -> Result<Self> {
        let mut seen = HashSet::with_capacity(edges.len());
        for &(i, j, w) in &edges {
            if i >= n || j >= n {
                return Err(Error::EdgeOutOfRange { i, j, n });
            }
            if i == j {
                return Err(Error::SelfLoop(i));
            }
            if !w.is_finite() || w <= 0.0 {
                return Err(Error::NonPositiveWeight { i, j, w });
            }
            if !seen.insert((i.min(j), i.max(j))) {
                return Err(Error::DuplicateEdge(i.min(j), i.max(j)));
            }
        }
        Ok(Self { n, edges })
    }

    /// Unweighted cycle graph C_n.
    pub fn cycle(n: usize) -> Result<Self> {
        let edges = (0..n).map(|i| (i, (i + 1) % n, 1.0)).collect();
        Self::new(n, edges)
    }

    /// Unweighted path graph P_n.
    pub fn path(n: usize) -> Result<Self> {
        let edges = (0..n.saturating_sub(1)).map(|i| (i, i + 1, 1.0)).collect();
        Self::new(n, edges)
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize, f64)] {
        &self.edges
    }

    /// Dense symmetric adjacency matrix with zero diagonal.
    pub fn adjacency_matrix(&self) -> Array2<f64> {
        let mut a = Array2::zeros((self.n, self.n));
        for &(i, j, w) in &self.edges {
            a[[i, j]] = w;
            a[[j, i]] = w;
        }
        a
    }

    /// Weighted degree of each vertex.
    pub fn degrees(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.n];
        for &(i, j, w) in &self.edges {
            d[i] += w;
            d[j] += w;
        }
        d
    }

    /// Normalized Laplacian `I - D^{-1/2} A D^{-1/2}`.
    ///
    /// Symmetric with unit diagonal and spectrum contained in `[0, 2]`.
    /// Isolated vertices are rejected because `D^{-1/2}` is undefined there.
    pub fn normalized_laplacian(&self) -> Result<Array2<f64>> {
        let deg = self.degrees();
        if let Some(i) = deg.iter().position(|&d| d <= 0.0) {
            return Err(Error::IsolatedVertex(i));
        }
        let inv_sqrt: Vec<f64> = deg.iter().map(|d| 1.0 / d.sqrt()).collect();
        let mut l = Array2::eye(self.n);
        for &(i, j, w) in &self.edges {
            let v = inv_sqrt[i] * w * inv_sqrt[j];
            l[[i, j]] = -v;
            l[[j, i]] = -v;
        }
        Ok(l)
    }

    /// Relabels vertices: vertex `i` of the new graph is vertex `sigma[i]`
    /// of this one, matching the matrix action `M -> P^T M P`.
    pub fn permuted(&self, sigma: &[usize]) -> Result<Self> {
        let inv = invert_permutation(sigma, self.n)?;
        let edges = self
            .edges
            .iter()
            .map(|&(i, j, w)| (inv[i], inv[j], w))
            .collect();
        Self::new(self.n, edges)
    }

    /// Parses the edge-list text format: one `i j [w]` per line, `#` comments,
    /// optional `n <count>` header; weight defaults to 1.
    pub fn from_edge_list(text: &str) -> Result<Self> {
        let mut n_header: Option<usize> = None;
        let mut edges: Vec<(usize, usize, f64)> = Vec::new();
        let mut max_index = 0usize;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let toks: Vec<&str> = line.split_whitespace().collect();
            let parse_err = |msg: &str| Error::Parse {
                line: lineno + 1,
                msg: msg.to_string(),
            };
            if toks[0] == "n" {
                if toks.len() != 2 {
                    return Err(parse_err("header must be `n <count>`"));
                }
                n_header = Some(
                    toks[1]
                        .parse()
                        .map_err(|_| parse_err("invalid vertex count"))?,
                );
                continue;
            }
            if toks.len() < 2 || toks.len() > 3 {
                return Err(parse_err("expected `i j [w]`"));
            }
            let i: usize = toks[0].parse().map_err(|_| parse_err("invalid index"))?;
            let j: usize = toks[1].parse().map_err(|_| parse_err("invalid index"))?;
            let w: f64 = match toks.get(2) {
                Some(t) => t.parse().map_err(|_| parse_err("invalid weight"))?,
                None => 1.0,
            };
            max_index = max_index.max(i).max(j);
            edges.push((i, j, w));
        }
        let n = n_header.unwrap_or(if edges.is_empty() { 0 } else { max_index + 1 });
        Self::new(n, edges)
    }

    /// Serializes to the same edge-list format `from_edge_list` reads.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "n {}", self.n);
        for &(i, j, w) in &self.edges {
            let _ = writeln!(out, "{} {} {}", i, j, w);
        }
        out
    }
}

/// Real-valued function on the vertices of a graph, stored as a dense vector.
#[derive(Debug, Clone, PartialEq)]
pub struct VertexFunction {
    values: Vec<f64>,
}

impl VertexFunction {
    pub fn new(values: Vec<f64>) -> Self {
        Self { values }
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

    pub fn norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Euclidean norm within 1e-12 relative tolerance of 1.
    pub fn is_unit(&self) -> bool {
        (self.norm() - 1.0).abs() <= 1e-12
    }
}

/// Unit indicator function `delta_x` on `n` vertices.
pub fn indicator(x: usize, n: usize) -> Result<VertexFunction> {
    if x >= n {
        return Err(Error::IndexOutOfRange { index: x, len: n });
    }
    let mut values = vec![0.0; n];
    values[x] = 1.0;
    Ok(VertexFunction::new(values))
}

/// Unit pair indicator: `(delta_x + delta_y) / sqrt(2)` for `x != y`,
/// `delta_x` for `x == y`.
pub fn pair_indicator(x: usize, y: usize, n: usize) -> Result<VertexFunction> {
    if x >= n || y >= n {
        let bad = if x >= n { x } else { y };
        return Err(Error::IndexOutOfRange { index: bad, len: n });
    }
    if x == y {
        return indicator(x, n);
    }
    let mut values = vec![0.0; n];
    let v = 1.0 / 2.0_f64.sqrt();
    values[x] = v;
    values[y] = v;
    Ok(VertexFunction::new(values))
}

/// Checks `sigma` is a permutation of `0..n` and returns its inverse.
pub(crate) fn invert_permutation(sigma: &[usize], n: usize) -> Result<Vec<usize>> {
    if sigma.len() != n {
        return Err(Error::InvalidPermutation(n));
    }
    let mut inv = vec![usize::MAX; n];
    for (i, &s) in sigma.iter().enumerate() {
        if s >= n || inv[s] != usize::MAX {
            return Err(Error::InvalidPermutation(n));
        }
        inv[s] = i;
    }
    Ok(inv)
}
