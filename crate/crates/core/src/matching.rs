//! Spectral graph matching: the GRAMPA similarity matrix and its rounding
//! to a node correspondence.
//!
//! A returned [`Permutation`] `p` maps node `i` of the first graph to node
//! `p[i]` of the second, so `apply_permutation(A₁, p)` is the first
//! adjacency expressed in the second graph's labels.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{GgdError, Result};
use crate::graph::{AdjacencyMatrix, Graph, Permutation};
use crate::spectral::sym_eig;

/// Graphs with fewer nodes than this default to the wider kernel.
pub const SMALL_GRAPH_NODES: usize = 100;

/// Bandwidth used when none is given: 0.5 below [`SMALL_GRAPH_NODES`],
/// 0.2 otherwise.
pub fn default_eta(n: usize) -> f64 {
    if n < SMALL_GRAPH_NODES {
        0.5
    } else {
        0.2
    }
}

/// Scores within this fraction of the largest magnitude count as tied.
const TIE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rounding {
    #[default]
    Lap,
    Greedy,
}

impl std::str::FromStr for Rounding {
    type Err = GgdError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lap" => Ok(Rounding::Lap),
            "greedy" => Ok(Rounding::Greedy),
            other => Err(GgdError::InvalidArgument(format!(
                "unknown rounding '{other}' (expected lap or greedy)"
            ))),
        }
    }
}

/// Dense score matrix: rows are nodes of the first graph, columns nodes of
/// the second.
#[derive(Debug, Clone)]
pub struct SimilarityMatrix {
    pub entries: DMatrix<f64>,
    pub eta: f64,
}

fn check_eta(eta: f64) -> Result<()> {
    if !(eta.is_finite() && eta > 0.0) {
        return Err(GgdError::InvalidArgument(format!("bandwidth eta must be positive, got {eta}")));
    }
    Ok(())
}

pub fn cauchy_weight(x: f64, y: f64, eta: f64) -> Result<f64> {
    check_eta(eta)?;
    Ok(1.0 / ((x - y).powi(2) + eta * eta))
}

/// `X̂ = Σᵢⱼ w(ζᵢ, μⱼ)(uᵢᵀ𝟙)(vⱼᵀ𝟙) uᵢvⱼᵀ`, evaluated as `U (W ∘ abᵀ) Vᵀ`
/// with `a = Uᵀ𝟙`, `b = Vᵀ𝟙`.
pub fn similarity_matrix(
    a1: &AdjacencyMatrix,
    a2: &AdjacencyMatrix,
    eta: f64,
) -> Result<SimilarityMatrix> {
    check_eta(eta)?;
    let n = a1.dim();
    if a2.dim() != n {
        return Err(GgdError::DimensionMismatch {
            expected: n,
            actual: a2.dim(),
        });
    }
    let e1 = sym_eig(a1.matrix())?;
    let e2 = sym_eig(a2.matrix())?;
    let ones = DVector::from_element(n, 1.0);
    let a = e1.vectors.transpose() * &ones;
    let b = e2.vectors.transpose() * &ones;
    let inner = DMatrix::from_fn(n, n, |i, j| {
        let w = 1.0 / ((e1.values[i] - e2.values[j]).powi(2) + eta * eta);
        w * a[i] * b[j]
    });
    let entries = &e1.vectors * inner * e2.vectors.transpose();
    Ok(SimilarityMatrix { entries, eta })
}

fn tie_tolerance(x: &DMatrix<f64>) -> f64 {
    TIE_TOL * x.amax().max(f64::MIN_POSITIVE)
}

/// Row-wise argmax; ties go to the smallest column. The result need not be
/// a bijection.
pub fn round_greedy(x: &SimilarityMatrix) -> Vec<usize> {
    let m = &x.entries;
    let tol = tie_tolerance(m);
    (0..m.nrows())
        .map(|i| {
            let mut best = 0;
            for j in 1..m.ncols() {
                if m[(i, j)] > m[(i, best)] + tol {
                    best = j;
                }
            }
            best
        })
        .collect()
}

fn double_center(m: &DMatrix<f64>) -> DMatrix<f64> {
    let n = m.nrows() as f64;
    let rows: Vec<f64> = m.row_iter().map(|r| r.sum() / n).collect();
    let cols: Vec<f64> = m.column_iter().map(|c| c.sum() / n).collect();
    let grand = rows.iter().sum::<f64>() / n;
    DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)] - rows[i] - cols[j] + grand)
}

/// Exact maximum-weight assignment (Hungarian algorithm with potentials,
/// O(n³)).
///
/// Row and column offsets do not change which assignments are optimal, so
/// they are removed first; a matrix whose rows differ only by constants
/// (as happens for regular graphs) then ties exactly. Each augmentation
/// grows a shortest-path tree one column at a time; among columns whose
/// reduced cost ties the minimum, a free column is preferred, then the
/// smallest index. Fully tied inputs therefore yield the identity.
pub fn round_lap(x: &SimilarityMatrix) -> Result<Permutation> {
    let m = &x.entries;
    let n = m.nrows();
    if m.ncols() != n {
        return Err(GgdError::DimensionMismatch {
            expected: n,
            actual: m.ncols(),
        });
    }
    if m.iter().any(|v| !v.is_finite()) {
        return Err(GgdError::InvalidArgument("similarity matrix has non-finite entries".into()));
    }
    let tol = tie_tolerance(m);
    let centered = double_center(m);
    // 1-based arrays; row/column 0 is the virtual root.
    let cost = |i: usize, j: usize| -centered[(i - 1, j - 1)];
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut owner = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];

    for row in 1..=n {
        owner[0] = row;
        let mut j0 = 0;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = owner[j0];
            let mut delta = f64::INFINITY;
            for j in 1..=n {
                if !used[j] {
                    let cur = cost(i0, j) - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    delta = delta.min(minv[j]);
                }
            }
            let tied = |j: usize| !used[j] && minv[j] <= delta + tol;
            let j1 = (1..=n)
                .find(|&j| tied(j) && owner[j] == 0)
                .or_else(|| (1..=n).find(|&j| tied(j)))
                .expect("an unused column remains");
            let delta = minv[j1];
            for j in 0..=n {
                if used[j] {
                    u[owner[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if owner[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            owner[j0] = owner[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut mapping = vec![0; n];
    for j in 1..=n {
        mapping[owner[j] - 1] = j - 1;
    }
    Permutation::new(mapping)
}

/// Sum of the selected entries `Σᵢ X̂_{i,p(i)}`.
pub fn assignment_score(x: &SimilarityMatrix, p: &[usize]) -> f64 {
    p.iter().enumerate().map(|(i, &j)| x.entries[(i, j)]).sum()
}

/// Rounds with the requested strategy. The flag reports a greedy result
/// that was not a bijection and was replaced by the assignment optimum.
pub fn round(x: &SimilarityMatrix, rounding: Rounding) -> Result<(Permutation, bool)> {
    match rounding {
        Rounding::Lap => Ok((round_lap(x)?, false)),
        Rounding::Greedy => match Permutation::new(round_greedy(x)) {
            Ok(p) => Ok((p, false)),
            Err(_) => Ok((round_lap(x)?, true)),
        },
    }
}

/// Correspondence from `g1`'s nodes onto `g2`'s nodes.
pub fn match_graphs(g1: &Graph, g2: &Graph, eta: f64, rounding: Rounding) -> Result<Permutation> {
    if g1.node_count() != g2.node_count() {
        return Err(GgdError::DimensionMismatch {
            expected: g1.node_count(),
            actual: g2.node_count(),
        });
    }
    let x = similarity_matrix(&g1.adjacency(), &g2.adjacency(), eta)?;
    Ok(round(&x, rounding)?.0)
}
