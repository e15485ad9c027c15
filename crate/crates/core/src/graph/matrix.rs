use nalgebra::DMatrix;

use super::Graph;
use crate::error::{GgdError, Result};

/// Symmetric weighted adjacency matrix with zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct AdjacencyMatrix(DMatrix<f64>);

impl AdjacencyMatrix {
    /// Wraps a dense matrix after checking shape, symmetry, zero diagonal and
    /// non-negative entries.
    pub fn from_matrix(m: DMatrix<f64>) -> Result<Self> {
        let n = m.nrows();
        if m.ncols() != n {
            return Err(GgdError::DimensionMismatch {
                expected: n,
                actual: m.ncols(),
            });
        }
        for i in 0..n {
            if m[(i, i)] != 0.0 {
                return Err(GgdError::InvalidGraph(format!("nonzero diagonal at {i}")));
            }
            for j in 0..i {
                if m[(i, j)] != m[(j, i)] {
                    return Err(GgdError::NotSymmetric((m[(i, j)] - m[(j, i)]).abs()));
                }
                if !(m[(i, j)] >= 0.0 && m[(i, j)].is_finite()) {
                    return Err(GgdError::InvalidGraph(format!(
                        "invalid adjacency entry at ({i}, {j})"
                    )));
                }
            }
        }
        Ok(AdjacencyMatrix(m))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_inner(self) -> DMatrix<f64> {
        self.0
    }

    pub fn to_graph(&self) -> Graph {
        let n = self.dim();
        let edges = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .filter(|&(i, j)| self.0[(i, j)] > 0.0)
            .map(|(i, j)| (i, j, self.0[(i, j)]));
        Graph::new(n, edges).expect("adjacency invariants imply a valid graph")
    }
}

/// `L = D - A`.
#[derive(Debug, Clone, PartialEq)]
pub struct LaplacianMatrix(DMatrix<f64>);

impl LaplacianMatrix {
    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_inner(self) -> DMatrix<f64> {
        self.0
    }
}

/// `L + εI`, a point on the cone of SPD matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct ModifiedLaplacian {
    matrix: DMatrix<f64>,
    epsilon: f64,
}

impl ModifiedLaplacian {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }
}

/// Node correspondence: node `i` maps to `mapping[i]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn new(mapping: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; mapping.len()];
        for &j in &mapping {
            if j >= mapping.len() || seen[j] {
                return Err(GgdError::InvalidArgument(format!(
                    "mapping is not a bijection on 0..{}",
                    mapping.len()
                )));
            }
            seen[j] = true;
        }
        Ok(Permutation(mapping))
    }

    pub fn identity(n: usize) -> Self {
        Permutation((0..n).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<usize> {
        self.0
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.0.len()];
        for (i, &j) in self.0.iter().enumerate() {
            inv[j] = i;
        }
        Permutation(inv)
    }

    /// `self ∘ other`: first apply `other`, then `self`.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        Permutation(other.0.iter().map(|&j| self.0[j]).collect())
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &j)| i == j)
    }
}

pub fn build_adjacency(g: &Graph) -> AdjacencyMatrix {
    let n = g.node_count();
    let mut a = DMatrix::zeros(n, n);
    for e in g.edges() {
        a[(e.u, e.v)] = e.w;
        a[(e.v, e.u)] = e.w;
    }
    AdjacencyMatrix(a)
}

pub fn build_laplacian(a: &AdjacencyMatrix) -> LaplacianMatrix {
    let n = a.dim();
    let mut l = -a.matrix().clone();
    for i in 0..n {
        let deg: f64 = a.matrix().row(i).iter().sum();
        l[(i, i)] = deg;
    }
    LaplacianMatrix(l)
}

pub fn modify_laplacian(l: &LaplacianMatrix, epsilon: f64) -> Result<ModifiedLaplacian> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(GgdError::InvalidArgument(format!(
            "epsilon must be positive, got {epsilon}"
        )));
    }
    let mut m = l.matrix().clone();
    for i in 0..m.nrows() {
        m[(i, i)] += epsilon;
    }
    Ok(ModifiedLaplacian { matrix: m, epsilon })
}

/// `π A πᵀ` as an index relabeling: entry `(i, j)` moves to `(p[i], p[j])`.
pub fn apply_permutation(a: &AdjacencyMatrix, p: &Permutation) -> Result<AdjacencyMatrix> {
    let n = a.dim();
    if p.len() != n {
        return Err(GgdError::DimensionMismatch {
            expected: n,
            actual: p.len(),
        });
    }
    let map = p.as_slice();
    let src = a.matrix();
    let mut out = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            out[(map[i], map[j])] = src[(i, j)];
        }
    }
    Ok(AdjacencyMatrix(out))
}
