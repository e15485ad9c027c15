//! Dense symmetric eigenproblems, the symmetric-definite pencil, and
//! effective resistances.

mod lanczos;
mod resistance;

pub use resistance::{
    effective_resistance_exact, effective_resistance_krylov, effective_resistance_krylov_from,
    krylov_basis, krylov_basis_of, ExactResistance, KrylovBasis, KrylovResistance,
};

use nalgebra::{Cholesky, DMatrix, DVector, SymmetricEigen};

use crate::error::{GgdError, Result};

/// Pencils up to this size are solved by full decomposition in
/// [`extreme_generalized_eigs`]; larger ones go through Lanczos.
pub const DENSE_EXTREME_CUTOFF: usize = 300;

const SYMMETRY_TOL: f64 = 1e-10;

/// Eigenpairs of a symmetric matrix, eigenvalues ascending, eigenvectors as
/// orthonormal columns in the same order.
#[derive(Debug, Clone)]
pub struct EigDecomposition {
    pub values: Vec<f64>,
    pub vectors: DMatrix<f64>,
}

impl EigDecomposition {
    pub fn reconstruct(&self) -> DMatrix<f64> {
        let d = DMatrix::from_diagonal(&DVector::from_column_slice(&self.values));
        &self.vectors * d * self.vectors.transpose()
    }

    /// `Q f(Λ) Qᵀ`.
    pub fn map_values(&self, f: impl Fn(f64) -> f64) -> DMatrix<f64> {
        let mut scaled = self.vectors.clone();
        for (j, &v) in self.values.iter().enumerate() {
            let fv = f(v);
            scaled.column_mut(j).scale_mut(fv);
        }
        scaled * self.vectors.transpose()
    }
}

/// Eigenvalues of `𝓛₁⁻¹𝓛₂`, sorted descending. Partial spectra keep the
/// `k` largest followed by the `k` smallest.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneralizedSpectrum {
    pub values: Vec<f64>,
}

impl GeneralizedSpectrum {
    pub fn max(&self) -> f64 {
        self.values.first().copied().unwrap_or(f64::NAN)
    }

    pub fn min(&self) -> f64 {
        self.values.last().copied().unwrap_or(f64::NAN)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

fn check_square(m: &DMatrix<f64>) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(GgdError::DimensionMismatch {
            expected: m.nrows(),
            actual: m.ncols(),
        });
    }
    Ok(m.nrows())
}

fn check_symmetric(m: &DMatrix<f64>) -> Result<()> {
    let n = check_square(m)?;
    let scale = m.amax().max(1.0);
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..i {
            worst = worst.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    if worst > SYMMETRY_TOL * scale || m.iter().any(|x| !x.is_finite()) {
        return Err(GgdError::NotSymmetric(worst));
    }
    Ok(())
}

/// Full symmetric eigendecomposition, eigenvalues ascending.
pub fn sym_eig(m: &DMatrix<f64>) -> Result<EigDecomposition> {
    check_symmetric(m)?;
    let n = m.nrows();
    if n == 0 {
        return Ok(EigDecomposition {
            values: Vec::new(),
            vectors: DMatrix::zeros(0, 0),
        });
    }
    let sym = (m + m.transpose()) * 0.5;
    let cap = 100 * n.max(1);
    let eig = SymmetricEigen::try_new(sym, f64::EPSILON, cap).ok_or(GgdError::NoConvergence(cap))?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    Ok(EigDecomposition { values, vectors })
}

/// Eigenvalues only, ascending.
pub fn sym_eigvals(m: &DMatrix<f64>) -> Result<Vec<f64>> {
    check_symmetric(m)?;
    let n = m.nrows();
    let sym = (m + m.transpose()) * 0.5;
    let cap = 100 * n.max(1);
    let mut values: Vec<f64> = SymmetricEigen::try_new(sym, f64::EPSILON, cap)
        .ok_or(GgdError::NoConvergence(cap))?
        .eigenvalues
        .iter()
        .copied()
        .collect();
    values.sort_by(f64::total_cmp);
    Ok(values)
}

/// Symmetric-definite reduction of the pencil: with `l1 = R Rᵀ`, returns
/// the Cholesky factor and `C = R⁻¹ l2 R⁻ᵀ`, which shares its spectrum with
/// `l1⁻¹ l2`.
pub(crate) fn reduce_pencil(
    l1: &DMatrix<f64>,
    l2: &DMatrix<f64>,
) -> Result<(Cholesky<f64, nalgebra::Dyn>, DMatrix<f64>)> {
    let n = check_square(l1)?;
    if check_square(l2)? != n {
        return Err(GgdError::DimensionMismatch {
            expected: n,
            actual: l2.nrows(),
        });
    }
    check_symmetric(l1)?;
    check_symmetric(l2)?;
    let chol = Cholesky::new(l1.clone()).ok_or(GgdError::NotPositiveDefinite)?;
    let r = chol.l();
    let half = r
        .solve_lower_triangular(l2)
        .ok_or(GgdError::NotPositiveDefinite)?;
    let c = r
        .solve_lower_triangular(&half.transpose())
        .ok_or(GgdError::NotPositiveDefinite)?;
    let c = (&c + c.transpose()) * 0.5;
    Ok((chol, c))
}

fn check_positive(values: &[f64]) -> Result<()> {
    if values.iter().any(|&v| !(v > 0.0)) {
        return Err(GgdError::NotPositiveDefinite);
    }
    Ok(())
}

/// All eigenvalues of `l1⁻¹ l2` for SPD `l1`, `l2`, descending.
pub fn generalized_eig_spd(l1: &DMatrix<f64>, l2: &DMatrix<f64>) -> Result<GeneralizedSpectrum> {
    let (_, c) = reduce_pencil(l1, l2)?;
    let mut values = sym_eigvals(&c)?;
    values.reverse();
    check_positive(&values)?;
    Ok(GeneralizedSpectrum { values })
}

/// Like [`generalized_eig_spd`] but also returns the pencil eigenvectors
/// `x_i` (columns) with `l2 x = λ l1 x`.
pub fn generalized_eig_spd_vectors(
    l1: &DMatrix<f64>,
    l2: &DMatrix<f64>,
) -> Result<(GeneralizedSpectrum, DMatrix<f64>)> {
    let (chol, c) = reduce_pencil(l1, l2)?;
    let eig = sym_eig(&c)?;
    let n = c.nrows();
    let order: Vec<usize> = (0..n).rev().collect();
    let values: Vec<f64> = order.iter().map(|&i| eig.values[i]).collect();
    check_positive(&values)?;
    let y = DMatrix::from_fn(n, n, |r, col| eig.vectors[(r, order[col])]);
    let x = chol
        .l()
        .transpose()
        .solve_upper_triangular(&y)
        .ok_or(GgdError::NotPositiveDefinite)?;
    Ok((GeneralizedSpectrum { values }, x))
}

/// The `k` largest and `k` smallest eigenvalues of `l1⁻¹ l2`, returned as
/// `[λ₁ ≥ … ≥ λ_k, λ_{n−k+1} ≥ … ≥ λ_n]`.
pub fn extreme_generalized_eigs(
    l1: &DMatrix<f64>,
    l2: &DMatrix<f64>,
    k: usize,
) -> Result<GeneralizedSpectrum> {
    let n = check_square(l1)?;
    if k == 0 || k > n / 2 {
        return Err(GgdError::InvalidArgument(format!(
            "extreme pair count {k} outside 1..={}",
            n / 2
        )));
    }
    if n <= DENSE_EXTREME_CUTOFF {
        let full = generalized_eig_spd(l1, l2)?;
        return Ok(take_extremes(&full.values, k));
    }
    extreme_generalized_eigs_lanczos(l1, l2, k)
}

/// Lanczos path of [`extreme_generalized_eigs`], usable at any size.
pub fn extreme_generalized_eigs_lanczos(
    l1: &DMatrix<f64>,
    l2: &DMatrix<f64>,
    k: usize,
) -> Result<GeneralizedSpectrum> {
    let n = check_square(l1)?;
    if k == 0 || k > n / 2 {
        return Err(GgdError::InvalidArgument(format!(
            "extreme pair count {k} outside 1..={}",
            n / 2
        )));
    }
    let (_, c) = reduce_pencil(l1, l2)?;
    let (mut top, mut bottom) = lanczos::extremes(&c, k)?;
    top.sort_by(|a, b| b.total_cmp(a));
    bottom.sort_by(|a, b| b.total_cmp(a));
    let mut values = top;
    values.extend(bottom);
    check_positive(&values)?;
    Ok(GeneralizedSpectrum { values })
}

pub(crate) fn take_extremes(descending: &[f64], k: usize) -> GeneralizedSpectrum {
    let n = descending.len();
    let mut values = descending[..k].to_vec();
    values.extend_from_slice(&descending[n - k..]);
    GeneralizedSpectrum { values }
}
