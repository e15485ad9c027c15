use crate::error::{GgdError, Result};
use crate::graph::Graph;
use crate::spectral::generalized_eig_spd;

/// Largest node count accepted by the exhaustive cut search.
pub const MAX_CUT_NODES: usize = 20;

#[derive(Debug, Clone, PartialEq)]
pub struct CutMismatch {
    /// `max cut₁(S) / cut₂(S)` over subsets where both cuts are positive.
    pub ratio: f64,
    /// A maximizing subset, sorted.
    pub subset: Vec<usize>,
    /// Subsets cut in the first graph but not the second; their ratio is
    /// unbounded and they are left out of the maximum.
    pub unbounded_subsets: usize,
}

/// Total weight of edges with exactly one endpoint in `mask`.
pub fn cut_value(g: &Graph, mask: u32) -> f64 {
    g.edges()
        .iter()
        .filter(|e| ((mask >> e.u) ^ (mask >> e.v)) & 1 == 1)
        .map(|e| e.w)
        .sum()
}

/// Exhaustive maximum cut ratio between two graphs on the same node set.
///
/// `S` and its complement have the same cut, so only subsets that leave
/// out the last node are visited.
pub fn brute_force_cut_mismatch(g1: &Graph, g2: &Graph) -> Result<CutMismatch> {
    let n = g1.node_count();
    if g2.node_count() != n {
        return Err(GgdError::DimensionMismatch {
            expected: n,
            actual: g2.node_count(),
        });
    }
    if n > MAX_CUT_NODES {
        return Err(GgdError::InvalidArgument(format!(
            "exhaustive cut search is limited to {MAX_CUT_NODES} nodes, got {n}"
        )));
    }
    if n < 2 {
        return Err(GgdError::Infeasible("a cut needs at least two nodes".into()));
    }
    let mut best = f64::NEG_INFINITY;
    let mut best_mask = 0u32;
    let mut unbounded = 0;
    for mask in 1..(1u32 << (n - 1)) {
        let c1 = cut_value(g1, mask);
        let c2 = cut_value(g2, mask);
        if c2 > 0.0 && c1 > 0.0 {
            let r = c1 / c2;
            if r > best {
                best = r;
                best_mask = mask;
            }
        } else if c1 > 0.0 {
            unbounded += 1;
        }
    }
    if best_mask == 0 {
        return Err(GgdError::Infeasible("no subset is cut in both graphs".into()));
    }
    Ok(CutMismatch {
        ratio: best,
        subset: (0..n).filter(|&i| best_mask >> i & 1 == 1).collect(),
        unbounded_subsets: unbounded,
    })
}

/// Largest eigenvalue of `𝓛₂⁻¹𝓛₁`, i.e. `max xᵀ𝓛₁x / xᵀ𝓛₂x`, which bounds
/// every cut ratio `cut₁(S) / cut₂(S)` from above as ε → 0.
pub fn pencil_lambda_max(g1: &Graph, g2: &Graph, epsilon: f64) -> Result<f64> {
    let l1 = g1.modified_laplacian(epsilon)?;
    let l2 = g2.modified_laplacian(epsilon)?;
    Ok(generalized_eig_spd(l2.matrix(), l1.matrix())?.max())
}
