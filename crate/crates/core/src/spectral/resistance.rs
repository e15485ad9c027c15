//! Effective resistance, exactly from the Laplacian eigensystem or
//! approximately from an adjacency Krylov subspace.

use nalgebra::{DMatrix, DVector};

use super::{sym_eig, EigDecomposition};
use crate::error::{GgdError, Result};
use crate::graph::{components, AdjacencyMatrix, Graph};

/// Relative norm below which a new Krylov direction counts as breakdown.
const BREAKDOWN_TOL: f64 = 1e-12;
/// Rayleigh quotients below this are treated as the constant direction.
const NULL_QUOTIENT: f64 = 1e-12;

fn check_nodes(g: &Graph, p: usize, q: usize) -> Result<()> {
    let n = g.node_count();
    if p >= n || q >= n {
        return Err(GgdError::InvalidArgument(format!(
            "node pair ({p}, {q}) out of range for {n} nodes"
        )));
    }
    Ok(())
}

fn require_connected(g: &Graph) -> Result<()> {
    let comps = components(g).len();
    if comps != 1 {
        return Err(GgdError::Disconnected { components: comps });
    }
    Ok(())
}

/// Laplacian eigensystem of a connected graph, reused across resistance
/// queries.
#[derive(Debug, Clone)]
pub struct ExactResistance {
    eig: EigDecomposition,
}

impl ExactResistance {
    pub fn new(g: &Graph) -> Result<Self> {
        require_connected(g)?;
        let eig = sym_eig(g.laplacian().matrix())?;
        Ok(ExactResistance { eig })
    }

    /// `Σ_{i≥2} (u_iᵀ b_pq)² / σ_i`; the smallest eigenpair (the constant
    /// vector) is skipped. `p == q` yields 0.
    pub fn between(&self, p: usize, q: usize) -> f64 {
        if p == q {
            return 0.0;
        }
        let u = &self.eig.vectors;
        self.eig
            .values
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &sigma)| {
                let proj = u[(p, i)] - u[(q, i)];
                proj * proj / sigma
            })
            .sum()
    }
}

pub fn effective_resistance_exact(g: &Graph, p: usize, q: usize) -> Result<f64> {
    check_nodes(g, p, q)?;
    if p == q {
        return Ok(0.0);
    }
    Ok(ExactResistance::new(g)?.between(p, q))
}

/// Orthonormal basis of `span{x, Ax, …, A^{m−1}x}`.
#[derive(Debug, Clone)]
pub struct KrylovBasis {
    pub vectors: Vec<DVector<f64>>,
    pub requested_order: usize,
}

impl KrylovBasis {
    pub fn order(&self) -> usize {
        self.vectors.len()
    }

    /// True when the subspace became invariant before the requested order.
    pub fn broke_down(&self) -> bool {
        self.vectors.len() < self.requested_order
    }

    pub fn as_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_columns(&self.vectors)
    }
}

/// Orthogonalizes `v` against `basis` (two Gram-Schmidt passes) and returns
/// it normalized, or `None` if nothing of relative size `BREAKDOWN_TOL`
/// survives.
fn extend(basis: &[DVector<f64>], mut v: DVector<f64>) -> Option<DVector<f64>> {
    let before = v.norm();
    if before == 0.0 {
        return None;
    }
    for _ in 0..2 {
        for q in basis {
            let c = q.dot(&v);
            v.axpy(-c, q, 1.0);
        }
    }
    let after = v.norm();
    (after >= BREAKDOWN_TOL * before.max(1.0)).then(|| v / after)
}

pub fn krylov_basis(a: &AdjacencyMatrix, x: &DVector<f64>, m: usize) -> Result<KrylovBasis> {
    krylov_basis_of(a.matrix(), x, m)
}

/// [`krylov_basis`] for an arbitrary square operator.
pub fn krylov_basis_of(op: &DMatrix<f64>, x: &DVector<f64>, m: usize) -> Result<KrylovBasis> {
    let n = op.nrows();
    if x.len() != n {
        return Err(GgdError::DimensionMismatch {
            expected: n,
            actual: x.len(),
        });
    }
    if m == 0 || m > n {
        return Err(GgdError::InvalidArgument(format!("Krylov order {m} outside 1..={n}")));
    }
    let norm = x.norm();
    if !(norm > 0.0) {
        return Err(GgdError::InvalidArgument("Krylov start vector is zero".into()));
    }
    let mut vectors = vec![x / norm];
    while vectors.len() < m {
        let next = op * vectors.last().expect("non-empty");
        match extend(&vectors, next) {
            Some(v) => vectors.push(v),
            None => break,
        }
    }
    Ok(KrylovBasis {
        vectors,
        requested_order: m,
    })
}

/// Krylov resistance estimate with the default start vector `b_pq/‖b_pq‖`.
pub fn effective_resistance_krylov(g: &Graph, p: usize, q: usize, m: usize) -> Result<f64> {
    check_nodes(g, p, q)?;
    if p == q {
        return Ok(0.0);
    }
    let mut b = DVector::zeros(g.node_count());
    b[p] = 1.0;
    b[q] = -1.0;
    effective_resistance_krylov_from(g, p, q, m, &b)
}

/// Krylov resistance estimate from an explicit start vector.
///
/// See [`KrylovResistance`] for the construction.
pub fn effective_resistance_krylov_from(
    g: &Graph,
    p: usize,
    q: usize,
    m: usize,
    x: &DVector<f64>,
) -> Result<f64> {
    check_nodes(g, p, q)?;
    require_connected(g)?;
    if p == q {
        return Ok(0.0);
    }
    Ok(KrylovResistance::new(g, m, x)?.between(p, q))
}

/// Resistance estimates from one order-`m` adjacency Krylov subspace.
///
/// The basis is rotated onto Ritz vectors of the Laplacian (Rayleigh-Ritz),
/// and `R(p, q) ≈ Σ (ũᵢᵀ b_pq)² / (ũᵢᵀ L ũᵢ)` over Ritz vectors whose
/// quotient is not numerically zero. If the adjacency subspace becomes
/// invariant early it is extended with Laplacian images of its own vectors,
/// so `m = n` always reproduces the exact value.
#[derive(Debug, Clone)]
pub struct KrylovResistance {
    ritz_vectors: DMatrix<f64>,
    ritz_values: Vec<f64>,
}

impl KrylovResistance {
    pub fn new(g: &Graph, m: usize, x: &DVector<f64>) -> Result<Self> {
        require_connected(g)?;
        let basis = krylov_basis(&g.adjacency(), x, m)?;
        let lap = g.laplacian().into_inner();

        let mut vectors = basis.vectors;
        let mut cursor = 0;
        while vectors.len() < m && cursor < vectors.len() {
            let image = &lap * &vectors[cursor];
            if let Some(v) = extend(&vectors, image) {
                vectors.push(v);
            }
            cursor += 1;
        }

        let qm = DMatrix::from_columns(&vectors);
        let projected = qm.transpose() * &lap * &qm;
        let ritz = sym_eig(&((&projected + projected.transpose()) * 0.5))?;
        Ok(KrylovResistance {
            ritz_vectors: qm * ritz.vectors,
            ritz_values: ritz.values,
        })
    }

    pub fn between(&self, p: usize, q: usize) -> f64 {
        if p == q {
            return 0.0;
        }
        self.ritz_values
            .iter()
            .enumerate()
            .filter(|(_, theta)| **theta >= NULL_QUOTIENT)
            .map(|(i, theta)| {
                let c = self.ritz_vectors[(p, i)] - self.ritz_vectors[(q, i)];
                c * c / theta
            })
            .sum()
    }
}
