use nalgebra::DMatrix;

use crate::error::{GgdError, Result};
use crate::ggd::{compute_ggd, GgdParams, GgdResult};
use crate::graph::{is_bridge, is_connected, Graph};
use crate::spectral::ExactResistance;

fn squared_distance(f: &DMatrix<f64>, i: usize, j: usize) -> f64 {
    (f.row(i) - f.row(j)).norm_squared()
}

/// Symmetric k-nearest-neighbour graph over the rows of `features`: `i ~ j`
/// when either is among the other's `k` nearest, weighted by the inverse
/// squared distance. Neighbour ties go to the lower index.
pub fn knn_graph(features: &DMatrix<f64>, k: usize) -> Result<Graph> {
    let n = features.nrows();
    if k == 0 || n < k + 1 {
        return Err(GgdError::InvalidArgument(format!(
            "k-nearest-neighbour graph needs 0 < k < n, got k = {k}, n = {n}"
        )));
    }
    if features.iter().any(|x| !x.is_finite()) {
        return Err(GgdError::InvalidArgument("features must be finite".into()));
    }
    let mut edges: Vec<(usize, usize)> = Vec::new();
    for i in 0..n {
        let mut others: Vec<(f64, usize)> = (0..n)
            .filter(|&j| j != i)
            .map(|j| (squared_distance(features, i, j), j))
            .collect();
        others.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        for &(d, j) in &others[..k] {
            if d == 0.0 {
                return Err(GgdError::InvalidArgument(format!("rows {i} and {j} coincide")));
            }
            edges.push((i.min(j), i.max(j)));
        }
    }
    edges.sort_unstable();
    edges.dedup();
    Graph::new(
        n,
        edges
            .into_iter()
            .map(|(i, j)| (i, j, 1.0 / squared_distance(features, i, j))),
    )
}

/// Graph view of a point cloud: the kNN graph with the `prune_fraction` of
/// edges carrying the least spectral weight `w · R_eff` removed. Removals
/// that would disconnect the graph are skipped. Rows become node features.
pub fn dataset_to_graph(features: &DMatrix<f64>, k: usize, prune_fraction: f64) -> Result<Graph> {
    if !(0.0..1.0).contains(&prune_fraction) {
        return Err(GgdError::InvalidArgument(format!(
            "prune fraction must lie in [0, 1), got {prune_fraction}"
        )));
    }
    let knn = knn_graph(features, k)?;
    if !is_connected(&knn) {
        return Err(GgdError::Disconnected {
            components: crate::graph::components(&knn).len(),
        });
    }
    let rows: Vec<Vec<f64>> = features.row_iter().map(|r| r.iter().copied().collect()).collect();
    let target = (prune_fraction * knn.edge_count() as f64).floor() as usize;
    if target == 0 {
        return knn.with_features(rows);
    }
    let res = ExactResistance::new(&knn)?;
    let mut order: Vec<(f64, usize)> = knn
        .edges()
        .iter()
        .enumerate()
        .map(|(i, e)| (e.w * res.between(e.u, e.v), i))
        .collect();
    order.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));

    let mut current = knn.clone();
    let mut removed = 0;
    for &(_, idx) in &order {
        if removed == target {
            break;
        }
        let e = knn.edges()[idx];
        if is_bridge(&current, e.u, e.v) {
            continue;
        }
        current = Graph::new(
            current.node_count(),
            current
                .edges()
                .iter()
                .filter(|x| (x.u, x.v) != (e.u, e.v))
                .map(|x| (x.u, x.v, x.w)),
        )?;
        removed += 1;
    }
    current.with_features(rows)
}

/// Distance between two point clouds through their graph views.
pub fn dataset_distance(
    a: &DMatrix<f64>,
    b: &DMatrix<f64>,
    k: usize,
    prune_fraction: f64,
    params: &GgdParams,
) -> Result<GgdResult> {
    let ga = dataset_to_graph(a, k, prune_fraction)?;
    let gb = dataset_to_graph(b, k, prune_fraction)?;
    compute_ggd(&ga, &gb, params)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::dmatrix;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Normal};

    #[test]
    fn collinear_triangle() {
        let f = dmatrix![0.0; 1.0; 3.0];
        let g = knn_graph(&f, 2).unwrap();
        assert_eq!(g.edge_count(), 3);
        assert_eq!(g.edge_weight(0, 1), Some(1.0));
        assert_eq!(g.edge_weight(1, 2), Some(0.25));
        assert_eq!(g.edge_weight(0, 2), Some(1.0 / 9.0));
        assert_eq!(dataset_to_graph(&f, 2, 0.0).unwrap().edge_count(), 3);

        // conductances 1, 1/4, 1/9; w·R for each edge by hand
        let (a, b, c) = (1.0, 0.25, 1.0 / 9.0);
        let rho_01 = a / (a + 1.0 / (1.0 / b + 1.0 / c));
        let rho_12 = b / (b + 1.0 / (1.0 / a + 1.0 / c));
        let rho_02 = c / (c + 1.0 / (1.0 / a + 1.0 / b));
        assert!(rho_02 < rho_01 && rho_02 < rho_12);
        let pruned = dataset_to_graph(&f, 2, 0.34).unwrap();
        assert_eq!(pruned.edge_count(), 2);
        assert!(!pruned.has_edge(0, 2));
        assert_eq!(pruned.features().unwrap()[2], vec![3.0]);
    }

    #[test]
    fn rejects_bad_input() {
        let f = dmatrix![0.0; 0.0; 1.0];
        assert!(knn_graph(&f, 1).is_err());
        assert!(knn_graph(&dmatrix![0.0; 1.0], 2).is_err());
        assert!(dataset_to_graph(&dmatrix![0.0; 1.0; 3.0], 2, 1.0).is_err());
        // two far pairs: 1-NN graph has two components
        let split = dmatrix![0.0; 1.0; 100.0; 101.0];
        assert!(matches!(
            dataset_to_graph(&split, 1, 0.0),
            Err(GgdError::Disconnected { components: 2 })
        ));
    }

    fn gaussian_clusters(centres: &[f64], per_cluster: usize, seed: u64) -> DMatrix<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let noise = Normal::new(0.0, 0.5).unwrap();
        DMatrix::from_fn(centres.len() * per_cluster, 2, |i, _| centres[i / per_cluster] + noise.sample(&mut rng))
    }

    #[test]
    fn two_clusters_stay_connected() {
        let f = gaussian_clusters(&[0.0, 1.0], 50, 5);
        let knn = knn_graph(&f, 5).unwrap();
        assert!(is_connected(&knn));
        let g = dataset_to_graph(&f, 5, 0.3).unwrap();
        assert!(is_connected(&g));
        let target = (0.3 * knn.edge_count() as f64).floor() as usize;
        assert_eq!(g.edge_count(), knn.edge_count() - target);
        let crossing = |g: &Graph| g.edges().iter().filter(|e| (e.u < 50) != (e.v < 50)).count();
        assert!(crossing(&g) <= crossing(&knn));
        assert!(crossing(&g) >= 1);
    }

    #[test]
    fn distance_examples() {
        let params = GgdParams::default();
        let f = gaussian_clusters(&[0.0, 1.0], 30, 6);
        assert!(dataset_distance(&f, &f, 5, 0.3, &params).unwrap().distance.abs() < 1e-6);

        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let p = crate::generators::random_permutation(f.nrows(), &mut rng);
        let mut shuffled = f.clone();
        for (i, &j) in p.as_slice().iter().enumerate() {
            shuffled.set_row(j, &f.row(i));
        }
        let permuted = dataset_distance(&f, &shuffled, 5, 0.3, &params).unwrap().distance;
        assert!(permuted.abs() < 1e-4, "{permuted}");

        let three = gaussian_clusters(&[0.0, 1.0, 2.0], 20, 8);
        let shifted = dataset_distance(&f, &three, 5, 0.3, &params).unwrap().distance;
        assert!(shifted > 0.0 && shifted > permuted, "{shifted}");
        assert_eq!(dataset_distance(&f, &three, 5, 0.3, &params).unwrap().distance, shifted);
    }
}
