//! Geodesic distances between modified Laplacians and the end-to-end
//! graph distance pipeline.
//!
//! The affine-invariant distance is `sqrt(Σ ln² λᵢ)` over the eigenvalues of
//! the pencil `𝓛₁⁻¹𝓛₂`; the log-Euclidean one is `‖log 𝓛₁ − log 𝓛₂‖_F`.
//! Logarithms are natural.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::coarsening::{coarsen_to_size, CoarsenOptions, CoarseningTrace, ResistanceMode};
use crate::error::{GgdError, Result};
use crate::graph::{apply_permutation, build_laplacian, components, giant_component, Graph, ModifiedLaplacian, DEFAULT_EPSILON};
use crate::matching::{default_eta, round, similarity_matrix, Rounding};
use crate::spectral::{extreme_generalized_eigs, generalized_eig_spd, sym_eig, sym_eigvals};

/// Printed alongside every normalized-Laplacian result.
pub const NORMALIZED_SENSITIVITY_WARNING: &str =
    "normalized-Laplacian distances are highly sensitive to epsilon; compare values only at equal epsilon";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum Variant {
    #[default]
    Airm,
    Lerm,
    /// Affine-invariant distance over the `k` largest and `k` smallest
    /// pencil eigenvalues.
    AirmApprox { k: usize },
    /// Affine-invariant distance between `D^{-1/2} L D^{-1/2} + εI`.
    AirmNormalized,
}

/// `sqrt(Σ ln² λ)`.
pub fn airm_from_spectrum(values: &[f64]) -> f64 {
    values.iter().map(|l| l.ln().powi(2)).sum::<f64>().sqrt()
}

fn frobenius_from_spectrum(values: &[f64]) -> f64 {
    values.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Affine-invariant distance between SPD matrices.
pub fn airm_distance(l1: &DMatrix<f64>, l2: &DMatrix<f64>) -> Result<f64> {
    Ok(airm_from_spectrum(&generalized_eig_spd(l1, l2)?.values))
}

pub fn ggd_airm(l1: &ModifiedLaplacian, l2: &ModifiedLaplacian) -> Result<f64> {
    airm_distance(l1.matrix(), l2.matrix())
}

/// Principal logarithm of an SPD matrix.
pub fn matrix_log(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let e = sym_eig(m)?;
    if e.values.iter().any(|&v| !(v > 0.0)) {
        return Err(GgdError::NotPositiveDefinite);
    }
    Ok(e.map_values(f64::ln))
}

fn check_same_dim(l1: &DMatrix<f64>, l2: &DMatrix<f64>) -> Result<()> {
    if l1.shape() != l2.shape() {
        return Err(GgdError::DimensionMismatch {
            expected: l1.nrows(),
            actual: l2.nrows(),
        });
    }
    Ok(())
}

/// Eigenvalues of `log l1 − log l2`, descending.
fn lerm_spectrum(l1: &DMatrix<f64>, l2: &DMatrix<f64>) -> Result<Vec<f64>> {
    check_same_dim(l1, l2)?;
    let diff = matrix_log(l1)? - matrix_log(l2)?;
    let mut values = sym_eigvals(&((&diff + diff.transpose()) * 0.5))?;
    values.reverse();
    Ok(values)
}

/// Log-Euclidean distance between SPD matrices.
pub fn lerm_distance(l1: &DMatrix<f64>, l2: &DMatrix<f64>) -> Result<f64> {
    check_same_dim(l1, l2)?;
    Ok((matrix_log(l1)? - matrix_log(l2)?).norm())
}

pub fn ggd_lerm(l1: &ModifiedLaplacian, l2: &ModifiedLaplacian) -> Result<f64> {
    lerm_distance(l1.matrix(), l2.matrix())
}

/// Affine-invariant distance restricted to the `k` extreme eigenvalue
/// pairs; never exceeds the full distance.
pub fn approx_distance(l1: &DMatrix<f64>, l2: &DMatrix<f64>, k: usize) -> Result<f64> {
    Ok(airm_from_spectrum(&extreme_generalized_eigs(l1, l2, k)?.values))
}

pub fn ggd_approx(l1: &ModifiedLaplacian, l2: &ModifiedLaplacian, k: usize) -> Result<f64> {
    approx_distance(l1.matrix(), l2.matrix(), k)
}

/// `D^{-1/2} L D^{-1/2} + εI`.
pub fn normalized_modified_laplacian(g: &Graph, epsilon: f64) -> Result<DMatrix<f64>> {
    if !(epsilon.is_finite() && epsilon > 0.0) {
        return Err(GgdError::InvalidArgument(format!("epsilon must be positive, got {epsilon}")));
    }
    let deg = g.weighted_degrees();
    if let Some(i) = deg.iter().position(|&d| d <= 0.0) {
        return Err(GgdError::Infeasible(format!("node {i} has zero degree")));
    }
    let s = DVector::from_iterator(deg.len(), deg.iter().map(|d| d.sqrt().recip()));
    let l = g.laplacian().into_inner();
    let n = g.node_count();
    Ok(DMatrix::from_fn(n, n, |i, j| s[i] * l[(i, j)] * s[j]) + DMatrix::identity(n, n) * epsilon)
}

/// Affine-invariant distance between modified normalized Laplacians of two
/// graphs on a shared node set.
pub fn ggd_normalized_variant(g1: &Graph, g2: &Graph, epsilon: f64) -> Result<f64> {
    airm_distance(
        &normalized_modified_laplacian(g1, epsilon)?,
        &normalized_modified_laplacian(g2, epsilon)?,
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GgdParams {
    pub epsilon: f64,
    /// Matching bandwidth; `None` picks it from the matched size.
    pub eta: Option<f64>,
    pub alpha: f64,
    pub variant: Variant,
    pub rounding: Rounding,
    pub resistance: ResistanceMode,
    pub batch: usize,
    /// Replace disconnected inputs by their largest component instead of
    /// failing.
    pub giant_component: bool,
}

impl Default for GgdParams {
    fn default() -> Self {
        GgdParams {
            epsilon: DEFAULT_EPSILON,
            eta: None,
            alpha: 0.0,
            variant: Variant::Airm,
            rounding: Rounding::Lap,
            resistance: ResistanceMode::Auto,
            batch: 1,
            giant_component: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GgdResult {
    pub distance: f64,
    /// Pencil eigenvalues (descending) for the affine-invariant variants;
    /// eigenvalues of `log 𝓛₁ − log 𝓛₂` for the log-Euclidean one.
    pub spectrum: Vec<f64>,
    pub epsilon: f64,
    pub eta: f64,
    pub variant: Variant,
    /// Node counts of the two inputs, after any component extraction.
    pub nodes: [usize; 2],
    /// True when the second input was larger and played the first role.
    pub swapped: bool,
    pub coarsening_trace: Option<CoarseningTrace>,
    /// Node `i` of the (coarsened) first graph corresponds to node
    /// `permutation[i]` of the second.
    pub permutation: Vec<usize>,
    /// Greedy rounding was not a bijection and the assignment optimum was
    /// used.
    pub rounding_fallback: bool,
    pub warnings: Vec<String>,
}

impl GgdResult {
    /// The distance implied by the recorded spectrum and variant.
    pub fn recompute_distance(&self) -> f64 {
        match self.variant {
            Variant::Lerm => frobenius_from_spectrum(&self.spectrum),
            _ => airm_from_spectrum(&self.spectrum),
        }
    }
}

fn prepare(g: &Graph, giant: bool) -> Result<Graph> {
    let comps = components(g).len();
    match comps {
        1 => Ok(g.clone()),
        _ if giant => giant_component(g),
        _ => Err(GgdError::Disconnected { components: comps }),
    }
}

/// Full pipeline: coarsen the larger graph to the smaller size, match, and
/// measure the chosen variant between the aligned modified Laplacians.
pub fn compute_ggd(g1: &Graph, g2: &Graph, params: &GgdParams) -> Result<GgdResult> {
    if !(params.epsilon.is_finite() && params.epsilon > 0.0) {
        return Err(GgdError::InvalidArgument(format!("epsilon must be positive, got {}", params.epsilon)));
    }
    let a = prepare(g1, params.giant_component)?;
    let b = prepare(g2, params.giant_component)?;
    let nodes = [a.node_count(), b.node_count()];
    let swapped = b.node_count() > a.node_count();
    let (big, small) = if swapped { (b, a) } else { (a, b) };

    let (big, trace) = if big.node_count() > small.node_count() {
        let opts = CoarsenOptions {
            alpha: params.alpha,
            mode: params.resistance,
            batch: params.batch,
        };
        let (coarse, trace) = coarsen_to_size(&big, small.node_count(), &opts)?;
        (coarse, Some(trace))
    } else {
        (big, None)
    };

    let n = small.node_count();
    let eta = params.eta.unwrap_or_else(|| default_eta(n));
    let a1 = big.adjacency();
    let a2 = small.adjacency();
    let x = similarity_matrix(&a1, &a2, eta)?;
    let (perm, rounding_fallback) = round(&x, params.rounding)?;
    let aligned = apply_permutation(&a1, &perm)?;

    let eps = params.epsilon;
    let l1 = build_laplacian(&aligned).matrix() + DMatrix::identity(n, n) * eps;
    let l2 = small.modified_laplacian(eps)?.matrix().clone();
    let mut warnings = Vec::new();
    let spectrum = match params.variant {
        Variant::Airm => generalized_eig_spd(&l1, &l2)?.values,
        Variant::Lerm => lerm_spectrum(&l1, &l2)?,
        Variant::AirmApprox { k } => extreme_generalized_eigs(&l1, &l2, k)?.values,
        Variant::AirmNormalized => {
            warnings.push(NORMALIZED_SENSITIVITY_WARNING.to_string());
            let n1 = normalized_modified_laplacian(&aligned.to_graph(), eps)?;
            let n2 = normalized_modified_laplacian(&small, eps)?;
            generalized_eig_spd(&n1, &n2)?.values
        }
    };

    let mut result = GgdResult {
        distance: 0.0,
        spectrum,
        epsilon: eps,
        eta,
        variant: params.variant,
        nodes,
        swapped,
        coarsening_trace: trace,
        permutation: perm.into_vec(),
        rounding_fallback,
        warnings,
    };
    result.distance = result.recompute_distance();
    Ok(result)
}
