use std::fmt;
use std::str::FromStr;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::distance::{pair_distances, sample_pairs};
use super::stats::pearson;
use crate::error::{GgdError, Result};
use crate::ggd::GgdParams;
use crate::graph::{is_bridge, is_connected, Graph};

/// Random subsets tried before node removal gives up on connectivity.
const NODE_DROP_ATTEMPTS: usize = 100;
/// Smallest population accepted by [`perturbation_study`].
const MIN_POPULATION: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PerturbKind {
    NodeDrop,
    NodeAdd,
    EdgeDrop,
    EdgeAdd,
}

impl fmt::Display for PerturbKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PerturbKind::NodeDrop => "node_drop",
            PerturbKind::NodeAdd => "node_add",
            PerturbKind::EdgeDrop => "edge_drop",
            PerturbKind::EdgeAdd => "edge_add",
        })
    }
}

impl FromStr for PerturbKind {
    type Err = GgdError;

    fn from_str(s: &str) -> Result<Self> {
        match s.replace('-', "_").as_str() {
            "node_drop" => Ok(PerturbKind::NodeDrop),
            "node_add" => Ok(PerturbKind::NodeAdd),
            "edge_drop" => Ok(PerturbKind::EdgeDrop),
            "edge_add" => Ok(PerturbKind::EdgeAdd),
            _ => Err(GgdError::InvalidArgument(format!(
                "unknown perturbation '{s}' (expected node_drop, node_add, edge_drop or edge_add)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PerturbationSpec {
    pub kind: PerturbKind,
    pub amount: usize,
    pub seed: u64,
}

impl PerturbationSpec {
    fn rng(&self, stream: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(stream);
        rng
    }
}

fn infeasible(msg: String) -> GgdError {
    GgdError::Infeasible(msg)
}

fn add_nodes<R: Rng>(g: &Graph, amount: usize, rng: &mut R) -> Result<Graph> {
    let n = g.node_count();
    let mut edges: Vec<(usize, usize, f64)> = g.edges().iter().map(|e| (e.u, e.v, e.w)).collect();
    let mut anchors = Vec::with_capacity(amount);
    for k in 0..amount {
        let anchor = rng.random_range(0..n + k);
        anchors.push(anchor);
        edges.push((anchor, n + k, 1.0));
    }
    let mut out = Graph::new(n + amount, edges)?;
    if let Some(f) = g.features() {
        // a new node copies its anchor's features
        let mut feats = f.to_vec();
        for &a in &anchors {
            feats.push(feats[a].clone());
        }
        out = out.with_features(feats)?;
    }
    Ok(out.with_label(g.label()))
}

fn drop_nodes<R: Rng>(g: &Graph, amount: usize, rng: &mut R) -> Result<Graph> {
    let n = g.node_count();
    if amount >= n {
        return Err(infeasible(format!("cannot drop {amount} of {n} nodes")));
    }
    for _ in 0..NODE_DROP_ATTEMPTS {
        let mut gone = vec![false; n];
        for i in index::sample(rng, n, amount) {
            gone[i] = true;
        }
        let keep: Vec<usize> = (0..n).filter(|&i| !gone[i]).collect();
        let sub = g.induced_subgraph(&keep)?;
        if is_connected(&sub) {
            return Ok(sub);
        }
    }
    Err(infeasible(format!(
        "no connected result after dropping {amount} nodes in {NODE_DROP_ATTEMPTS} attempts"
    )))
}

fn add_edges<R: Rng>(g: &Graph, amount: usize, rng: &mut R) -> Result<Graph> {
    let n = g.node_count();
    let candidates: Vec<(usize, usize)> = (0..n)
        .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
        .filter(|&(u, v)| !g.has_edge(u, v))
        .collect();
    if amount > candidates.len() {
        return Err(infeasible(format!(
            "cannot add {amount} edges: only {} non-edges",
            candidates.len()
        )));
    }
    let mut edges: Vec<(usize, usize, f64)> = g.edges().iter().map(|e| (e.u, e.v, e.w)).collect();
    for k in index::sample(rng, candidates.len(), amount) {
        let (u, v) = candidates[k];
        edges.push((u, v, 1.0));
    }
    let mut out = Graph::new(n, edges)?;
    if let Some(f) = g.features() {
        out = out.with_features(f.to_vec())?;
    }
    Ok(out.with_label(g.label()))
}

fn drop_edges<R: Rng>(g: &Graph, amount: usize, rng: &mut R) -> Result<Graph> {
    let mut current = g.clone();
    for step in 0..amount {
        let removable: Vec<usize> = (0..current.edge_count())
            .filter(|&i| {
                let e = current.edges()[i];
                !is_bridge(&current, e.u, e.v)
            })
            .collect();
        if removable.is_empty() {
            return Err(infeasible(format!(
                "only {step} of {amount} edges can be dropped without disconnecting"
            )));
        }
        let drop = removable[rng.random_range(0..removable.len())];
        let edges = current
            .edges()
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != drop)
            .map(|(_, e)| (e.u, e.v, e.w));
        let mut next = Graph::new(current.node_count(), edges)?;
        if let Some(f) = current.features() {
            next = next.with_features(f.to_vec())?;
        }
        current = next.with_label(g.label());
    }
    Ok(current)
}

/// Seeded random perturbation; the same spec always yields the same graph.
pub fn perturb(g: &Graph, spec: &PerturbationSpec) -> Result<Graph> {
    perturb_stream(g, spec, 0)
}

/// [`perturb`] on an independent random stream, so population members can
/// be perturbed in any order or in parallel with identical results.
fn perturb_stream(g: &Graph, spec: &PerturbationSpec, stream: u64) -> Result<Graph> {
    if spec.amount == 0 {
        return Ok(g.clone());
    }
    let mut rng = spec.rng(stream);
    match spec.kind {
        PerturbKind::NodeAdd => add_nodes(g, spec.amount, &mut rng),
        PerturbKind::NodeDrop => drop_nodes(g, spec.amount, &mut rng),
        PerturbKind::EdgeAdd => add_edges(g, spec.amount, &mut rng),
        PerturbKind::EdgeDrop => drop_edges(g, spec.amount, &mut rng),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PerturbationStudy {
    pub correlation: f64,
    /// `(before, after)` distance per pair, in `pairs` order.
    pub points: Vec<(f64, f64)>,
    pub pairs: Vec<(usize, usize)>,
}

/// Correlation between pairwise distances before and after perturbing
/// every graph. Graph `i` uses random stream `i` of the spec's seed.
pub fn perturbation_study(
    population: &[Graph],
    spec: &PerturbationSpec,
    params: &GgdParams,
    threads: Option<usize>,
) -> Result<PerturbationStudy> {
    if population.len() < MIN_POPULATION {
        return Err(GgdError::InvalidArgument(format!(
            "a perturbation study needs at least {MIN_POPULATION} graphs, got {}",
            population.len()
        )));
    }
    let perturbed = population
        .iter()
        .enumerate()
        .map(|(i, g)| perturb_stream(g, spec, i as u64))
        .collect::<Result<Vec<_>>>()?;
    let pairs = sample_pairs(population.len(), spec.seed);
    let before = pair_distances(population, &pairs, params, threads)?
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let after = if spec.amount == 0 {
        before.clone()
    } else {
        pair_distances(&perturbed, &pairs, params, threads)?
            .into_iter()
            .collect::<Result<Vec<_>>>()?
    };
    let correlation = pearson(&before, &after)?;
    Ok(PerturbationStudy {
        correlation,
        points: before.into_iter().zip(after).collect(),
        pairs,
    })
}
