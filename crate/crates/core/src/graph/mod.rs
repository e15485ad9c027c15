//! Weighted undirected graphs and the dense matrices derived from them.
//!
//! A [`Graph`] is immutable once built. Edges are stored canonically with
//! `u < v`, sorted lexicographically, so iteration order (and every result
//! computed from it) is deterministic.

mod connectivity;
pub mod io;
mod matrix;

pub use connectivity::{components, giant_component, is_bridge, is_connected};
pub use matrix::{
    apply_permutation, build_adjacency, build_laplacian, modify_laplacian, AdjacencyMatrix,
    LaplacianMatrix, ModifiedLaplacian, Permutation,
};

use crate::error::{GgdError, Result};

/// Default diagonal shift turning a Laplacian into an SPD matrix.
pub const DEFAULT_EPSILON: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub w: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    node_count: usize,
    edges: Vec<Edge>,
    features: Option<Vec<Vec<f64>>>,
    label: Option<i64>,
}

impl Graph {
    /// Builds a graph, rejecting self-loops, duplicate pairs, out-of-range
    /// endpoints and non-positive or non-finite weights.
    pub fn new<I>(node_count: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        if node_count == 0 {
            return Err(GgdError::InvalidGraph("graph must have at least one node".into()));
        }
        let mut canon = Vec::new();
        for (u, v, w) in edges {
            if u >= node_count || v >= node_count {
                return Err(GgdError::InvalidGraph(format!(
                    "edge ({u}, {v}) out of range for {node_count} nodes"
                )));
            }
            if u == v {
                return Err(GgdError::InvalidGraph(format!("self-loop at node {u}")));
            }
            if !(w.is_finite() && w > 0.0) {
                return Err(GgdError::InvalidGraph(format!(
                    "edge ({u}, {v}) has non-positive weight {w}"
                )));
            }
            let (u, v) = if u < v { (u, v) } else { (v, u) };
            canon.push(Edge { u, v, w });
        }
        canon.sort_by_key(|e| (e.u, e.v));
        if let Some(pair) = canon.windows(2).find(|p| (p[0].u, p[0].v) == (p[1].u, p[1].v)) {
            return Err(GgdError::InvalidGraph(format!(
                "duplicate edge ({}, {})",
                pair[0].u, pair[0].v
            )));
        }
        Ok(Graph {
            node_count,
            edges: canon,
            features: None,
            label: None,
        })
    }

    /// Unit-weight graph from an edge list.
    pub fn unweighted<I>(node_count: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        Self::new(node_count, edges.into_iter().map(|(u, v)| (u, v, 1.0)))
    }

    pub fn with_features(mut self, features: Vec<Vec<f64>>) -> Result<Self> {
        if features.len() != self.node_count {
            return Err(GgdError::InvalidGraph(format!(
                "{} feature vectors for {} nodes",
                features.len(),
                self.node_count
            )));
        }
        let dim = features[0].len();
        if features.iter().any(|f| f.len() != dim) {
            return Err(GgdError::InvalidGraph("feature vectors differ in dimension".into()));
        }
        if features.iter().flatten().any(|x| !x.is_finite()) {
            return Err(GgdError::InvalidGraph("non-finite feature value".into()));
        }
        self.features = Some(features);
        Ok(self)
    }

    pub fn with_label(mut self, label: Option<i64>) -> Self {
        self.label = label;
        self
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn features(&self) -> Option<&[Vec<f64>]> {
        self.features.as_deref()
    }

    pub fn feature_dim(&self) -> Option<usize> {
        self.features.as_ref().map(|f| f[0].len())
    }

    pub fn label(&self) -> Option<i64> {
        self.label
    }

    /// Weight of edge `{u, v}`, if present.
    pub fn edge_weight(&self, u: usize, v: usize) -> Option<f64> {
        let key = if u < v { (u, v) } else { (v, u) };
        self.edges
            .binary_search_by(|e| (e.u, e.v).cmp(&key))
            .ok()
            .map(|i| self.edges[i].w)
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.edge_weight(u, v).is_some()
    }

    pub fn weighted_degrees(&self) -> Vec<f64> {
        let mut deg = vec![0.0; self.node_count];
        for e in &self.edges {
            deg[e.u] += e.w;
            deg[e.v] += e.w;
        }
        deg
    }

    /// Neighbor lists in ascending order.
    pub fn neighbors(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.node_count];
        for e in &self.edges {
            adj[e.u].push(e.v);
            adj[e.v].push(e.u);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        adj
    }

    pub fn total_weight(&self) -> f64 {
        self.edges.iter().map(|e| e.w).sum()
    }

    pub fn adjacency(&self) -> AdjacencyMatrix {
        build_adjacency(self)
    }

    pub fn laplacian(&self) -> LaplacianMatrix {
        build_laplacian(&self.adjacency())
    }

    pub fn modified_laplacian(&self, epsilon: f64) -> Result<ModifiedLaplacian> {
        modify_laplacian(&self.laplacian(), epsilon)
    }

    /// Relabels node `i` as `p[i]`; features move with their nodes.
    pub fn relabel(&self, p: &Permutation) -> Result<Graph> {
        if p.len() != self.node_count {
            return Err(GgdError::DimensionMismatch {
                expected: self.node_count,
                actual: p.len(),
            });
        }
        let map = p.as_slice();
        let mut g = Graph::new(
            self.node_count,
            self.edges.iter().map(|e| (map[e.u], map[e.v], e.w)),
        )?;
        if let Some(f) = &self.features {
            let mut moved = vec![Vec::new(); self.node_count];
            for (i, fi) in f.iter().enumerate() {
                moved[map[i]] = fi.clone();
            }
            g = g.with_features(moved)?;
        }
        Ok(g.with_label(self.label))
    }

    /// Same topology with every weight multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Graph> {
        let g = Graph::new(
            self.node_count,
            self.edges.iter().map(|e| (e.u, e.v, e.w * factor)),
        )?;
        let g = match &self.features {
            Some(f) => g.with_features(f.clone())?,
            None => g,
        };
        Ok(g.with_label(self.label))
    }

    /// Induced subgraph on `nodes` (kept in the given order), carrying
    /// features and the graph label.
    pub fn induced_subgraph(&self, nodes: &[usize]) -> Result<Graph> {
        let mut index = vec![usize::MAX; self.node_count];
        for (new, &old) in nodes.iter().enumerate() {
            index[old] = new;
        }
        let edges = self
            .edges
            .iter()
            .filter(|e| index[e.u] != usize::MAX && index[e.v] != usize::MAX)
            .map(|e| (index[e.u], index[e.v], e.w));
        let mut g = Graph::new(nodes.len(), edges)?;
        if let Some(f) = &self.features {
            g = g.with_features(nodes.iter().map(|&i| f[i].clone()).collect())?;
        }
        Ok(g.with_label(self.label))
    }
}
