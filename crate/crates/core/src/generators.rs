//! Small graph families and seeded random models used by tests, the
//! experiment harness and benchmarks.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::graph::{is_connected, Graph, Permutation};

pub fn ring(n: usize) -> Graph {
    assert!(n >= 3, "ring needs at least 3 nodes");
    Graph::unweighted(n, (0..n).map(|i| (i, (i + 1) % n))).expect("valid ring")
}

pub fn path(n: usize) -> Graph {
    assert!(n >= 1, "path needs a node");
    Graph::unweighted(n, (1..n).map(|i| (i - 1, i))).expect("valid path")
}

pub fn complete(n: usize) -> Graph {
    assert!(n >= 1, "complete graph needs a node");
    let edges = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)));
    Graph::unweighted(n, edges).expect("valid complete graph")
}

/// Edge probability `2 ln n / n`, which makes `G(n, p)` connected with high
/// probability.
pub fn connectivity_edge_probability(n: usize) -> f64 {
    if n < 2 {
        return 1.0;
    }
    (2.0 * (n as f64).ln() / n as f64).min(1.0)
}

/// Unweighted `G(n, p)` sample.
pub fn erdos_renyi<R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> Graph {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.random::<f64>() < p {
                edges.push((u, v));
            }
        }
    }
    Graph::unweighted(n, edges).expect("valid sample")
}

/// `G(n, 2 ln n / n)` resampled until connected.
pub fn connected_erdos_renyi<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Graph {
    let p = connectivity_edge_probability(n);
    loop {
        let g = erdos_renyi(n, p, rng);
        if is_connected(&g) {
            return g;
        }
    }
}

pub fn random_permutation<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Permutation {
    let mut p: Vec<usize> = (0..n).collect();
    p.shuffle(rng);
    Permutation::new(p).expect("shuffle is a bijection")
}

/// Ring of `n` nodes plus `chords` distinct random non-ring edges.
pub fn ring_with_chords<R: Rng + ?Sized>(n: usize, chords: usize, rng: &mut R) -> Graph {
    let base = ring(n);
    let mut candidates: Vec<(usize, usize)> = (0..n)
        .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
        .filter(|&(u, v)| !base.has_edge(u, v))
        .collect();
    assert!(chords <= candidates.len(), "not enough non-edges for {chords} chords");
    candidates.shuffle(rng);
    let edges = base
        .edges()
        .iter()
        .map(|e| (e.u, e.v))
        .chain(candidates.into_iter().take(chords));
    Graph::unweighted(n, edges).expect("valid chorded ring")
}

/// True when 1-dimensional color refinement (weights included) gives every
/// node its own color, which certifies that the only automorphism is the
/// identity. A `false` answer is inconclusive.
pub fn has_trivial_automorphisms(g: &Graph) -> bool {
    let n = g.node_count();
    let mut adj: Vec<Vec<(usize, u64)>> = vec![Vec::new(); n];
    for e in g.edges() {
        adj[e.u].push((e.v, e.w.to_bits()));
        adj[e.v].push((e.u, e.w.to_bits()));
    }
    let mut colors = vec![0usize; n];
    let mut classes = 1;
    loop {
        let signatures: Vec<(usize, Vec<(usize, u64)>)> = (0..n)
            .map(|i| {
                let mut s: Vec<(usize, u64)> = adj[i].iter().map(|&(j, w)| (colors[j], w)).collect();
                s.sort_unstable();
                (colors[i], s)
            })
            .collect();
        let mut palette = BTreeMap::new();
        for s in &signatures {
            let next = palette.len();
            palette.entry(s.clone()).or_insert(next);
        }
        colors = signatures.iter().map(|s| palette[s]).collect();
        if palette.len() == n {
            return true;
        }
        if palette.len() == classes {
            return false;
        }
        classes = palette.len();
    }
}
