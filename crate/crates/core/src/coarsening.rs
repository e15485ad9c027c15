//! Resistance-guided edge contraction down to an exact node count.
//!
//! Each round scores every edge by `R*(p, q) = R_eff(p, q) + α‖f_p − f_q‖`
//! on the current graph and contracts the lowest-scoring edge. Contracting
//! `(p, q)` keeps the merged node at index `min(p, q)` and shifts higher
//! indices down by one.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{GgdError, Result};
use crate::graph::{components, Graph};
use crate::spectral::{effective_resistance_exact, effective_resistance_krylov, ExactResistance, KrylovResistance};

/// Largest graph for which [`ResistanceMode::Auto`] uses the exact solver.
pub const AUTO_EXACT_MAX_NODES: usize = 500;
/// Krylov order used by [`ResistanceMode::Auto`] above that size.
pub const AUTO_KRYLOV_ORDER: usize = 50;
/// Relative gap below which two scores are tied.
const SCORE_TIE: f64 = 1e-12;
const KRYLOV_START_SEED: u64 = 0x6b72_796c;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ResistanceMode {
    #[default]
    Auto,
    Exact,
    Krylov(usize),
}

impl ResistanceMode {
    /// Concrete mode for a graph of `n` nodes; never returns `Auto`, and a
    /// Krylov order is capped at `n`.
    pub fn resolve(self, n: usize) -> ResistanceMode {
        match self {
            ResistanceMode::Auto if n <= AUTO_EXACT_MAX_NODES => ResistanceMode::Exact,
            ResistanceMode::Auto => ResistanceMode::Krylov(n.min(AUTO_KRYLOV_ORDER)),
            ResistanceMode::Krylov(m) => ResistanceMode::Krylov(m.min(n)),
            ResistanceMode::Exact => ResistanceMode::Exact,
        }
    }
}

impl fmt::Display for ResistanceMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ResistanceMode::Auto => write!(f, "auto"),
            ResistanceMode::Exact => write!(f, "exact"),
            ResistanceMode::Krylov(m) => write!(f, "krylov:{m}"),
        }
    }
}

impl FromStr for ResistanceMode {
    type Err = GgdError;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || GgdError::InvalidArgument(format!("unknown resistance mode '{s}' (expected auto, exact or krylov:M)"));
        match s {
            "auto" => Ok(ResistanceMode::Auto),
            "exact" => Ok(ResistanceMode::Exact),
            _ => {
                let m: usize = s.strip_prefix("krylov:").ok_or_else(bad)?.parse().map_err(|_| bad())?;
                if m == 0 {
                    return Err(bad());
                }
                Ok(ResistanceMode::Krylov(m))
            }
        }
    }
}

impl Serialize for ResistanceMode {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ResistanceMode {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoarseningStep {
    /// Endpoints in the labels of the graph the round started from.
    pub p: usize,
    pub q: usize,
    pub resistance: f64,
    /// Node count once this contraction is applied.
    pub nodes: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CoarseningTrace {
    pub steps: Vec<CoarseningStep>,
}

impl CoarseningTrace {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoarsenOptions {
    pub alpha: f64,
    pub mode: ResistanceMode,
    /// Disjoint edges contracted per round; 1 rescores after every
    /// contraction.
    pub batch: usize,
}

impl Default for CoarsenOptions {
    fn default() -> Self {
        CoarsenOptions {
            alpha: 0.0,
            mode: ResistanceMode::Auto,
            batch: 1,
        }
    }
}

fn check_alpha(g: &Graph, alpha: f64) -> Result<()> {
    if !(alpha.is_finite() && alpha >= 0.0) {
        return Err(GgdError::InvalidArgument(format!("alpha must be non-negative, got {alpha}")));
    }
    if alpha > 0.0 && g.features().is_none() {
        return Err(GgdError::InvalidArgument("alpha > 0 requires node features".into()));
    }
    Ok(())
}

fn feature_gap(g: &Graph, p: usize, q: usize) -> f64 {
    match g.features() {
        Some(f) => f[p].iter().zip(&f[q]).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt(),
        None => 0.0,
    }
}

fn require_edge(g: &Graph, p: usize, q: usize) -> Result<()> {
    if p >= g.node_count() || q >= g.node_count() || !g.has_edge(p, q) {
        return Err(GgdError::InvalidArgument(format!("({p}, {q}) is not an edge")));
    }
    Ok(())
}

/// `R_eff(p, q) + α‖f_p − f_q‖` for an edge `(p, q)`.
pub fn modified_edge_resistance(g: &Graph, p: usize, q: usize, alpha: f64, mode: ResistanceMode) -> Result<f64> {
    require_edge(g, p, q)?;
    check_alpha(g, alpha)?;
    let r = match mode.resolve(g.node_count()) {
        ResistanceMode::Krylov(m) => effective_resistance_krylov(g, p, q, m)?,
        _ => effective_resistance_exact(g, p, q)?,
    };
    let gap = if alpha > 0.0 { alpha * feature_gap(g, p, q) } else { 0.0 };
    Ok(r + gap)
}

/// Merges the endpoints of `(p, q)` into one node.
///
/// Parallel edges sum their weights, the edge itself disappears, and the
/// merged feature is the weighted-degree average of the two endpoints.
pub fn contract_edge(g: &Graph, p: usize, q: usize) -> Result<Graph> {
    require_edge(g, p, q)?;
    contract_pairs(g, &[(p, q)])
}

/// Contracts several vertex-disjoint edges at once.
pub fn contract_pairs(g: &Graph, pairs: &[(usize, usize)]) -> Result<Graph> {
    let n = g.node_count();
    let mut partner: Vec<Option<usize>> = vec![None; n];
    for &(p, q) in pairs {
        require_edge(g, p, q)?;
        if partner[p].is_some() || partner[q].is_some() {
            return Err(GgdError::InvalidArgument(format!("edge ({p}, {q}) shares a node with another contraction")));
        }
        partner[p] = Some(q);
        partner[q] = Some(p);
    }
    // surviving index of every node: representatives are group minima
    let mut map = vec![0; n];
    let mut next = 0;
    for i in 0..n {
        match partner[i] {
            Some(j) if j < i => map[i] = map[j],
            _ => {
                map[i] = next;
                next += 1;
            }
        }
    }

    let mut merged: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    for e in g.edges() {
        let (a, b) = (map[e.u], map[e.v]);
        if a != b {
            *merged.entry((a.min(b), a.max(b))).or_insert(0.0) += e.w;
        }
    }
    let mut out = Graph::new(next, merged.into_iter().map(|((u, v), w)| (u, v, w)))?;

    if let Some(f) = g.features() {
        let deg = g.weighted_degrees();
        let dim = f[0].len();
        let mut sums = vec![vec![0.0; dim]; next];
        let mut mass = vec![0.0; next];
        for i in 0..n {
            let t = map[i];
            // isolated nodes never merge, so zero mass only occurs alone
            let w = if partner[i].is_some() { deg[i] } else { 1.0 };
            mass[t] += w;
            for (s, x) in sums[t].iter_mut().zip(&f[i]) {
                *s += w * x;
            }
        }
        for (s, m) in sums.iter_mut().zip(&mass) {
            s.iter_mut().for_each(|x| *x /= m);
        }
        out = out.with_features(sums)?;
    }
    Ok(out.with_label(g.label()))
}

/// Scores every edge of `g`, in edge order.
fn edge_scores(g: &Graph, alpha: f64, mode: ResistanceMode) -> Result<Vec<f64>> {
    let n = g.node_count();
    let resist: Box<dyn Fn(usize, usize) -> f64> = match mode.resolve(n) {
        ResistanceMode::Krylov(m) => {
            let mut rng = ChaCha8Rng::seed_from_u64(KRYLOV_START_SEED);
            let x = DVector::from_fn(n, |_, _| rng.random::<f64>() - 0.5);
            let k = KrylovResistance::new(g, m, &x)?;
            Box::new(move |p, q| k.between(p, q))
        }
        _ => {
            let e = ExactResistance::new(g)?;
            Box::new(move |p, q| e.between(p, q))
        }
    };
    Ok(g.edges()
        .iter()
        .map(|e| {
            let gap = if alpha > 0.0 { alpha * feature_gap(g, e.u, e.v) } else { 0.0 };
            resist(e.u, e.v) + gap
        })
        .collect())
}

/// Index of the lowest score among `eligible` edges; near-ties go to the
/// lexicographically first edge.
fn pick_min(scores: &[f64], eligible: impl Fn(usize) -> bool) -> Option<usize> {
    let best = scores
        .iter()
        .enumerate()
        .filter(|(i, _)| eligible(*i))
        .map(|(_, &s)| s)
        .fold(f64::INFINITY, f64::min);
    if !best.is_finite() {
        return None;
    }
    let cutoff = best + SCORE_TIE * best.abs();
    (0..scores.len()).find(|&i| eligible(i) && scores[i] <= cutoff)
}

/// Contracts minimum-score edges until `g` has `target` nodes.
///
/// Scores come from the current graph; with `batch > 1` a round takes up
/// to that many vertex-disjoint edges in score order before rescoring.
pub fn coarsen_to_size(g: &Graph, target: usize, opts: &CoarsenOptions) -> Result<(Graph, CoarseningTrace)> {
    let n = g.node_count();
    if target < 1 || target >= n {
        return Err(GgdError::InvalidArgument(format!("coarsening target {target} must lie in 1..{n}")));
    }
    if opts.batch == 0 {
        return Err(GgdError::InvalidArgument("batch size must be positive".into()));
    }
    check_alpha(g, opts.alpha)?;
    let comps = components(g).len();
    if comps != 1 {
        return Err(GgdError::Disconnected { components: comps });
    }

    let mut current = g.clone();
    let mut trace = CoarseningTrace::default();
    while current.node_count() > target {
        let scores = edge_scores(&current, opts.alpha, opts.mode)?;
        let quota = opts.batch.min(current.node_count() - target);
        let mut taken = vec![false; current.node_count()];
        let mut pairs = Vec::new();
        let edges = current.edges();
        while pairs.len() < quota {
            let Some(i) = pick_min(&scores, |i| !taken[edges[i].u] && !taken[edges[i].v]) else {
                break;
            };
            let e = edges[i];
            taken[e.u] = true;
            taken[e.v] = true;
            pairs.push((e.u, e.v));
            trace.steps.push(CoarseningStep {
                p: e.u,
                q: e.v,
                resistance: scores[i],
                nodes: current.node_count() - pairs.len(),
            });
        }
        current = contract_pairs(&current, &pairs)?;
    }
    Ok((current, trace))
}
