//! Soft-margin SVM on a precomputed (possibly indefinite) kernel, trained by
//! sequential minimal optimization with second-order working-set selection.

use nalgebra::DMatrix;

use crate::error::{GgdError, Result};

/// Curvature used when a working pair has a non-positive one.
const TAU: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SvmParams {
    pub c: f64,
    /// Stop once the maximal KKT violation falls below this.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SvmParams {
    fn default() -> Self {
        SvmParams {
            c: 1.0,
            tol: 1e-3,
            max_iter: 100_000,
        }
    }
}

/// Two-class model; the decision value is `Σ coefᵢ K(x, xᵢ) − ρ`, positive
/// for the `+1` class.
#[derive(Debug, Clone, PartialEq)]
pub struct BinarySvm {
    /// `αᵢ yᵢ` per training point.
    pub coef: Vec<f64>,
    pub rho: f64,
    pub iterations: usize,
    pub converged: bool,
}

impl BinarySvm {
    /// Solves `min ½ αᵀQα − 𝟙ᵀα` subject to `yᵀα = 0`, `0 ≤ α ≤ C`, with
    /// `Q = (y yᵀ) ∘ K`.
    pub fn train(k: &DMatrix<f64>, y: &[f64], params: &SvmParams) -> Result<Self> {
        let n = y.len();
        if k.shape() != (n, n) {
            return Err(GgdError::DimensionMismatch {
                expected: n,
                actual: k.nrows(),
            });
        }
        if y.iter().any(|&v| v != 1.0 && v != -1.0) {
            return Err(GgdError::InvalidArgument("labels must be +1 or -1".into()));
        }
        if !(params.c > 0.0) {
            return Err(GgdError::InvalidArgument(format!("C must be positive, got {}", params.c)));
        }
        let c = params.c;
        let q = |i: usize, j: usize| y[i] * y[j] * k[(i, j)];
        let mut alpha = vec![0.0; n];
        let mut grad = vec![-1.0; n];
        let upper = |a: f64| a >= c;
        let lower = |a: f64| a <= 0.0;

        let mut iterations = 0;
        let mut converged = false;
        while iterations < params.max_iter {
            // i: maximal violator among indices that can move up
            let mut gmax = f64::NEG_INFINITY;
            let mut i = usize::MAX;
            for t in 0..n {
                let free_up = if y[t] > 0.0 { !upper(alpha[t]) } else { !lower(alpha[t]) };
                if free_up && -y[t] * grad[t] >= gmax {
                    gmax = -y[t] * grad[t];
                    i = t;
                }
            }
            // j: best second-order gain among indices that can move down
            let mut gmax2 = f64::NEG_INFINITY;
            let mut j = usize::MAX;
            let mut best_obj = f64::INFINITY;
            for t in 0..n {
                let free_down = if y[t] > 0.0 { !lower(alpha[t]) } else { !upper(alpha[t]) };
                if !free_down {
                    continue;
                }
                let yg = y[t] * grad[t];
                gmax2 = gmax2.max(yg);
                if i == usize::MAX {
                    continue;
                }
                let diff = gmax + yg;
                if diff > 0.0 {
                    let quad = k[(i, i)] + k[(t, t)] - 2.0 * k[(i, t)];
                    let obj = -(diff * diff) / if quad > 0.0 { quad } else { TAU };
                    if obj <= best_obj {
                        best_obj = obj;
                        j = t;
                    }
                }
            }
            if i == usize::MAX || j == usize::MAX || gmax + gmax2 < params.tol {
                converged = true;
                break;
            }
            iterations += 1;

            let (old_i, old_j) = (alpha[i], alpha[j]);
            if y[i] != y[j] {
                let quad = (k[(i, i)] + k[(j, j)] - 2.0 * k[(i, j)]).max(0.0);
                let quad = if quad > 0.0 { quad } else { TAU };
                let delta = (-grad[i] - grad[j]) / quad;
                let diff = alpha[i] - alpha[j];
                alpha[i] += delta;
                alpha[j] += delta;
                if diff > 0.0 {
                    if alpha[j] < 0.0 {
                        alpha[j] = 0.0;
                        alpha[i] = diff;
                    }
                } else if alpha[i] < 0.0 {
                    alpha[i] = 0.0;
                    alpha[j] = -diff;
                }
                if diff > 0.0 {
                    if alpha[i] > c {
                        alpha[i] = c;
                        alpha[j] = c - diff;
                    }
                } else if alpha[j] > c {
                    alpha[j] = c;
                    alpha[i] = c + diff;
                }
            } else {
                let quad = k[(i, i)] + k[(j, j)] - 2.0 * k[(i, j)];
                let quad = if quad > 0.0 { quad } else { TAU };
                let delta = (grad[i] - grad[j]) / quad;
                let sum = alpha[i] + alpha[j];
                alpha[i] -= delta;
                alpha[j] += delta;
                if sum > c {
                    if alpha[i] > c {
                        alpha[i] = c;
                        alpha[j] = sum - c;
                    }
                } else if alpha[j] < 0.0 {
                    alpha[j] = 0.0;
                    alpha[i] = sum;
                }
                if sum > c {
                    if alpha[j] > c {
                        alpha[j] = c;
                        alpha[i] = sum - c;
                    }
                } else if alpha[i] < 0.0 {
                    alpha[i] = 0.0;
                    alpha[j] = sum;
                }
            }
            let (di, dj) = (alpha[i] - old_i, alpha[j] - old_j);
            for t in 0..n {
                grad[t] += q(i, t) * di + q(j, t) * dj;
            }
        }

        // ρ: mean over free vectors, else midpoint of the feasible interval
        let (mut ub, mut lb) = (f64::INFINITY, f64::NEG_INFINITY);
        let (mut free, mut free_sum) = (0usize, 0.0);
        for t in 0..n {
            let yg = y[t] * grad[t];
            if upper(alpha[t]) {
                if y[t] < 0.0 {
                    ub = ub.min(yg);
                } else {
                    lb = lb.max(yg);
                }
            } else if lower(alpha[t]) {
                if y[t] > 0.0 {
                    ub = ub.min(yg);
                } else {
                    lb = lb.max(yg);
                }
            } else {
                free += 1;
                free_sum += yg;
            }
        }
        let rho = if free > 0 { free_sum / free as f64 } else { (ub + lb) / 2.0 };
        Ok(BinarySvm {
            coef: alpha.iter().zip(y).map(|(a, yi)| a * yi).collect(),
            rho,
            iterations,
            converged,
        })
    }

    /// Decision value from the kernel row between a sample and the training
    /// points.
    pub fn decision(&self, kernel_row: impl Fn(usize) -> f64) -> f64 {
        self.coef
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != 0.0)
            .map(|(i, c)| c * kernel_row(i))
            .sum::<f64>()
            - self.rho
    }
}

#[derive(Debug, Clone)]
struct PairModel {
    first: usize,
    second: usize,
    members: Vec<usize>,
    svm: BinarySvm,
}

/// One-vs-one multiclass SVM; each class pair gets a binary model and the
/// prediction is the majority vote, ties to the smallest label.
#[derive(Debug, Clone)]
pub struct OneVsOneSvm {
    pub classes: Vec<i64>,
    models: Vec<PairModel>,
}

impl OneVsOneSvm {
    pub fn train(k: &DMatrix<f64>, labels: &[i64], params: &SvmParams) -> Result<Self> {
        if labels.is_empty() {
            return Err(GgdError::InvalidArgument("empty training set".into()));
        }
        let mut classes = labels.to_vec();
        classes.sort_unstable();
        classes.dedup();
        let mut models = Vec::new();
        for a in 0..classes.len() {
            for b in a + 1..classes.len() {
                let members: Vec<usize> = (0..labels.len())
                    .filter(|&i| labels[i] == classes[a] || labels[i] == classes[b])
                    .collect();
                let y: Vec<f64> = members
                    .iter()
                    .map(|&i| if labels[i] == classes[a] { 1.0 } else { -1.0 })
                    .collect();
                let sub = DMatrix::from_fn(members.len(), members.len(), |r, s| k[(members[r], members[s])]);
                let svm = BinarySvm::train(&sub, &y, params)?;
                models.push(PairModel {
                    first: a,
                    second: b,
                    members,
                    svm,
                });
            }
        }
        Ok(OneVsOneSvm { classes, models })
    }

    /// Predictions for each row of `k_test` (test × train kernel values).
    pub fn predict(&self, k_test: &DMatrix<f64>) -> Vec<i64> {
        (0..k_test.nrows())
            .map(|r| {
                let mut votes = vec![0usize; self.classes.len()];
                for m in &self.models {
                    let d = m.svm.decision(|i| k_test[(r, m.members[i])]);
                    votes[if d > 0.0 { m.first } else { m.second }] += 1;
                }
                let best = votes.iter().copied().max().unwrap_or(0);
                let winner = votes.iter().position(|&v| v == best).unwrap_or(0);
                self.classes[winner]
            })
            .collect()
    }

    pub fn converged(&self) -> bool {
        self.models.iter().all(|m| m.svm.converged)
    }
}
