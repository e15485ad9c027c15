//! Experiments built on the distance: pairwise matrices, classification,
//! cut-mismatch checks, perturbation studies and dataset graphs.

mod classify;
mod cut;
mod dataset;
mod distance;
mod perturb;
mod stats;
mod svm;

pub use classify::{
    classification_trials, classify, classify_from_distances, knn_predict, split_indices, ClassificationReport,
    Method, TrialReport, SVM_GAMMA_GRID,
};
pub use cut::{brute_force_cut_mismatch, cut_value, pencil_lambda_max, CutMismatch, MAX_CUT_NODES};
pub use dataset::{dataset_distance, dataset_to_graph, knn_graph};
pub use distance::{
    build_pool, cross_distances, distance_matrix, kernel_from_distances, pair_distances, sample_pairs,
    DistanceMatrix, FULL_PAIR_LIMIT, SAMPLED_PAIRS,
};
pub use perturb::{perturb, perturbation_study, PerturbKind, PerturbationSpec, PerturbationStudy};
pub use stats::{mean_std, pearson};
pub use svm::{BinarySvm, OneVsOneSvm, SvmParams};
