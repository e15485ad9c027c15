use std::collections::VecDeque;

use super::Graph;
use crate::error::{GgdError, Result};

/// Connected components, each sorted ascending, ordered by smallest member.
pub fn components(g: &Graph) -> Vec<Vec<usize>> {
    let adj = g.neighbors();
    let mut seen = vec![false; g.node_count()];
    let mut out = Vec::new();
    for start in 0..g.node_count() {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        let mut comp = vec![start];
        let mut queue = VecDeque::from([start]);
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    comp.push(v);
                    queue.push_back(v);
                }
            }
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out
}

pub fn is_connected(g: &Graph) -> bool {
    components(g).len() == 1
}

/// Largest connected component, densely reindexed. Ties go to the component
/// containing the smallest original node index.
pub fn giant_component(g: &Graph) -> Result<Graph> {
    let comps = components(g);
    // components are ordered by smallest member, so the first maximum wins ties
    let best = comps
        .iter()
        .fold(None::<&Vec<usize>>, |best, c| match best {
            Some(b) if b.len() >= c.len() => Some(b),
            _ => Some(c),
        })
        .ok_or_else(|| GgdError::InvalidGraph("empty graph".into()))?;
    g.induced_subgraph(best)
}

/// True if removing edge `{u, v}` disconnects its endpoints.
pub fn is_bridge(g: &Graph, u: usize, v: usize) -> bool {
    if !g.has_edge(u, v) {
        return false;
    }
    let adj = g.neighbors();
    let mut seen = vec![false; g.node_count()];
    seen[u] = true;
    let mut queue = VecDeque::from([u]);
    while let Some(x) = queue.pop_front() {
        for &y in &adj[x] {
            if (x == u && y == v) || (x == v && y == u) {
                continue;
            }
            if y == v {
                return false;
            }
            if !seen[y] {
                seen[y] = true;
                queue.push_back(y);
            }
        }
    }
    true
}
