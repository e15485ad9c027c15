use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::distance::{cross_distances, distance_matrix, kernel_from_distances};
use super::stats::mean_std;
use super::svm::{OneVsOneSvm, SvmParams};
use crate::error::{GgdError, Result};
use crate::ggd::GgdParams;
use crate::graph::Graph;

/// Kernel widths searched by inner cross-validation.
pub const SVM_GAMMA_GRID: [f64; 3] = [0.01, 0.05, 0.1];
const INNER_FOLDS: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum Method {
    Knn { k: usize },
    /// `gamma: None` selects it from [`SVM_GAMMA_GRID`] by cross-validation
    /// on the training split.
    Svm { gamma: Option<f64>, c: f64 },
}

impl Default for Method {
    fn default() -> Self {
        Method::Knn { k: 1 }
    }
}

/// Majority vote among the `k` nearest training points (distance ties by
/// index); vote ties go to the smallest label.
pub fn knn_predict(d_test_train: &DMatrix<f64>, train_labels: &[i64], k: usize) -> Result<Vec<i64>> {
    if train_labels.is_empty() {
        return Err(GgdError::InvalidArgument("empty training set".into()));
    }
    if k == 0 {
        return Err(GgdError::InvalidArgument("k must be positive".into()));
    }
    if d_test_train.ncols() != train_labels.len() {
        return Err(GgdError::DimensionMismatch {
            expected: train_labels.len(),
            actual: d_test_train.ncols(),
        });
    }
    let k = k.min(train_labels.len());
    Ok((0..d_test_train.nrows())
        .map(|r| {
            let mut order: Vec<usize> = (0..train_labels.len()).collect();
            order.sort_by(|&a, &b| d_test_train[(r, a)].total_cmp(&d_test_train[(r, b)]));
            let mut votes: Vec<(i64, usize)> = Vec::new();
            for &i in &order[..k] {
                match votes.iter_mut().find(|(l, _)| *l == train_labels[i]) {
                    Some(v) => v.1 += 1,
                    None => votes.push((train_labels[i], 1)),
                }
            }
            votes.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
            votes[0].0
        })
        .collect())
}

fn svm_predict(
    d_train: &DMatrix<f64>,
    train_labels: &[i64],
    d_test_train: &DMatrix<f64>,
    gamma: f64,
    c: f64,
) -> Result<Vec<i64>> {
    let params = SvmParams { c, ..SvmParams::default() };
    let model = OneVsOneSvm::train(&kernel_from_distances(d_train, gamma)?, train_labels, &params)?;
    Ok(model.predict(&kernel_from_distances(d_test_train, gamma)?))
}

fn accuracy(pred: &[i64], truth: &[i64]) -> f64 {
    let hits = pred.iter().zip(truth).filter(|(a, b)| a == b).count();
    hits as f64 / truth.len() as f64
}

fn submatrix(d: &DMatrix<f64>, rows: &[usize], cols: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(rows.len(), cols.len(), |r, c| d[(rows[r], cols[c])])
}

/// Stratified split: each class contributes `round(fraction · size)` test
/// items but always keeps at least one training item.
pub fn split_indices(labels: &[i64], test_fraction: f64, seed: u64) -> (Vec<usize>, Vec<usize>) {
    let mut classes = labels.to_vec();
    classes.sort_unstable();
    classes.dedup();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut train, mut test) = (Vec::new(), Vec::new());
    for c in classes {
        let mut members: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == c).collect();
        members.shuffle(&mut rng);
        let take = ((test_fraction * members.len() as f64).round() as usize).min(members.len() - 1);
        test.extend_from_slice(&members[..take]);
        train.extend_from_slice(&members[take..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    (train, test)
}

/// Picks γ by stratified inner cross-validation; ties go to the earlier
/// grid value.
fn select_gamma(d_train: &DMatrix<f64>, labels: &[i64], c: f64, seed: u64) -> Result<f64> {
    let mut counts: Vec<(i64, usize)> = Vec::new();
    for &l in labels {
        match counts.iter_mut().find(|(x, _)| *x == l) {
            Some(v) => v.1 += 1,
            None => counts.push((l, 1)),
        }
    }
    let folds = counts.iter().map(|c| c.1).min().unwrap_or(0).min(INNER_FOLDS);
    if folds < 2 || counts.len() < 2 {
        return Ok(SVM_GAMMA_GRID[0]);
    }
    // fold of each item: position within its shuffled class, modulo folds
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9);
    let mut fold = vec![0usize; labels.len()];
    for &(l, _) in &counts {
        let mut members: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == l).collect();
        members.shuffle(&mut rng);
        for (pos, &i) in members.iter().enumerate() {
            fold[i] = pos % folds;
        }
    }
    let mut best = (f64::NEG_INFINITY, SVM_GAMMA_GRID[0]);
    for &gamma in &SVM_GAMMA_GRID {
        let mut hits = 0.0;
        for f in 0..folds {
            let tr: Vec<usize> = (0..labels.len()).filter(|&i| fold[i] != f).collect();
            let te: Vec<usize> = (0..labels.len()).filter(|&i| fold[i] == f).collect();
            let tr_labels: Vec<i64> = tr.iter().map(|&i| labels[i]).collect();
            let te_labels: Vec<i64> = te.iter().map(|&i| labels[i]).collect();
            let pred = svm_predict(&submatrix(d_train, &tr, &tr), &tr_labels, &submatrix(d_train, &te, &tr), gamma, c)?;
            hits += accuracy(&pred, &te_labels) * te.len() as f64;
        }
        let acc = hits / labels.len() as f64;
        if acc > best.0 {
            best = (acc, gamma);
        }
    }
    Ok(best.1)
}

/// Predictions from precomputed distances; also returns the kernel width
/// used by the SVM.
pub fn classify_from_distances(
    d_train: &DMatrix<f64>,
    train_labels: &[i64],
    d_test_train: &DMatrix<f64>,
    method: &Method,
    seed: u64,
) -> Result<(Vec<i64>, Option<f64>)> {
    if train_labels.is_empty() {
        return Err(GgdError::InvalidArgument("empty training set".into()));
    }
    match *method {
        Method::Knn { k } => Ok((knn_predict(d_test_train, train_labels, k)?, None)),
        Method::Svm { gamma, c } => {
            let gamma = match gamma {
                Some(g) => g,
                None => select_gamma(d_train, train_labels, c, seed)?,
            };
            Ok((svm_predict(d_train, train_labels, d_test_train, gamma, c)?, Some(gamma)))
        }
    }
}

/// Classifies `test` graphs against labelled `train` graphs.
pub fn classify(
    train: &[Graph],
    train_labels: &[i64],
    test: &[Graph],
    params: &GgdParams,
    method: &Method,
    threads: Option<usize>,
    seed: u64,
) -> Result<Vec<i64>> {
    if train.is_empty() {
        return Err(GgdError::InvalidArgument("empty training set".into()));
    }
    if train.len() != train_labels.len() {
        return Err(GgdError::DimensionMismatch {
            expected: train.len(),
            actual: train_labels.len(),
        });
    }
    let d_test_train = cross_distances(test, train, params, threads)?;
    let d_train = match method {
        Method::Svm { .. } => distance_matrix(train, params, threads)?.values,
        Method::Knn { .. } => DMatrix::zeros(0, 0),
    };
    Ok(classify_from_distances(&d_train, train_labels, &d_test_train, method, seed)?.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialReport {
    pub seed: u64,
    pub accuracy: f64,
    pub train_size: usize,
    pub test_size: usize,
    pub gamma: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub method: Method,
    pub test_fraction: f64,
    pub trials: Vec<TrialReport>,
    pub mean: f64,
    pub std: f64,
}

/// Repeated stratified splits over one precomputed distance matrix; trial
/// `t` uses seed `seed + t`.
pub fn classification_trials(
    d: &DMatrix<f64>,
    labels: &[i64],
    method: &Method,
    trials: usize,
    test_fraction: f64,
    seed: u64,
) -> Result<ClassificationReport> {
    if d.shape() != (labels.len(), labels.len()) {
        return Err(GgdError::DimensionMismatch {
            expected: labels.len(),
            actual: d.nrows(),
        });
    }
    if !(0.0..1.0).contains(&test_fraction) || trials == 0 {
        return Err(GgdError::InvalidArgument(
            "need at least one trial and a test fraction in [0, 1)".into(),
        ));
    }
    let mut reports = Vec::with_capacity(trials);
    for t in 0..trials {
        let trial_seed = seed.wrapping_add(t as u64);
        let (train, test) = split_indices(labels, test_fraction, trial_seed);
        if test.is_empty() {
            return Err(GgdError::Infeasible("test split is empty".into()));
        }
        let train_labels: Vec<i64> = train.iter().map(|&i| labels[i]).collect();
        let test_labels: Vec<i64> = test.iter().map(|&i| labels[i]).collect();
        let (pred, gamma) = classify_from_distances(
            &submatrix(d, &train, &train),
            &train_labels,
            &submatrix(d, &test, &train),
            method,
            trial_seed,
        )?;
        reports.push(TrialReport {
            seed: trial_seed,
            accuracy: accuracy(&pred, &test_labels),
            train_size: train.len(),
            test_size: test.len(),
            gamma,
        });
    }
    let accs: Vec<f64> = reports.iter().map(|r| r.accuracy).collect();
    let (mean, std) = mean_std(&accs);
    Ok(ClassificationReport {
        method: *method,
        test_fraction,
        trials: reports,
        mean,
        std,
    })
}
