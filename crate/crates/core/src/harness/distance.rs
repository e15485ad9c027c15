use nalgebra::DMatrix;
use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rayon::ThreadPool;

use crate::error::{GgdError, Result};
use crate::ggd::{compute_ggd, GgdParams};
use crate::graph::Graph;

/// Populations up to this size use every pair.
pub const FULL_PAIR_LIMIT: usize = 200;
/// Pairs drawn from larger populations.
pub const SAMPLED_PAIRS: usize = 10_000;

/// Symmetric matrix of pairwise distances with a zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    pub values: DMatrix<f64>,
    pub params: GgdParams,
}

impl DistanceMatrix {
    pub fn len(&self) -> usize {
        self.values.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Copy scaled so the largest entry is one; an all-zero matrix is
    /// returned unchanged.
    pub fn normalized(&self) -> DistanceMatrix {
        let max = self.values.max();
        let values = if max > 0.0 {
            &self.values / max
        } else {
            self.values.clone()
        };
        DistanceMatrix {
            values,
            params: self.params,
        }
    }
}

/// Thread pool with `threads` workers, or rayon's default when `None`.
pub fn build_pool(threads: Option<usize>) -> Result<ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = threads {
        if t == 0 {
            return Err(GgdError::InvalidArgument("thread count must be positive".into()));
        }
        builder = builder.num_threads(t);
    }
    builder
        .build()
        .map_err(|e| GgdError::InvalidArgument(format!("cannot start thread pool: {e}")))
}

/// Distance for each listed pair, in list order. Every pair is computed
/// independently, so the values do not depend on the thread count.
pub fn pair_distances(
    graphs: &[Graph],
    pairs: &[(usize, usize)],
    params: &GgdParams,
    threads: Option<usize>,
) -> Result<Vec<Result<f64>>> {
    if let Some(&(i, j)) = pairs.iter().find(|&&(i, j)| i >= graphs.len() || j >= graphs.len()) {
        return Err(GgdError::InvalidArgument(format!(
            "pair ({i}, {j}) out of range for {} graphs",
            graphs.len()
        )));
    }
    let pool = build_pool(threads)?;
    Ok(pool.install(|| {
        pairs
            .par_iter()
            .map(|&(i, j)| {
                compute_ggd(&graphs[i], &graphs[j], params)
                    .map(|r| r.distance)
                    .map_err(|e| GgdError::Pair {
                        i,
                        j,
                        source: Box::new(e),
                    })
            })
            .collect()
    }))
}

/// All pairwise distances; the first failing pair (in row-major order) is
/// reported.
pub fn distance_matrix(graphs: &[Graph], params: &GgdParams, threads: Option<usize>) -> Result<DistanceMatrix> {
    let n = graphs.len();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let results = pair_distances(graphs, &pairs, params, threads)?;
    let mut values = DMatrix::zeros(n, n);
    for (&(i, j), r) in pairs.iter().zip(results) {
        let d = r?;
        values[(i, j)] = d;
        values[(j, i)] = d;
    }
    Ok(DistanceMatrix {
        values,
        params: *params,
    })
}

/// `rows.len() × cols.len()` distances between two collections.
pub fn cross_distances(
    rows: &[Graph],
    cols: &[Graph],
    params: &GgdParams,
    threads: Option<usize>,
) -> Result<DMatrix<f64>> {
    let pool = build_pool(threads)?;
    let cells: Vec<(usize, usize)> = (0..rows.len())
        .flat_map(|i| (0..cols.len()).map(move |j| (i, j)))
        .collect();
    let results: Vec<Result<f64>> = pool.install(|| {
        cells
            .par_iter()
            .map(|&(i, j)| {
                compute_ggd(&rows[i], &cols[j], params)
                    .map(|r| r.distance)
                    .map_err(|e| GgdError::Pair {
                        i,
                        j,
                        source: Box::new(e),
                    })
            })
            .collect()
    });
    let mut out = DMatrix::zeros(rows.len(), cols.len());
    for (&(i, j), r) in cells.iter().zip(results) {
        out[(i, j)] = r?;
    }
    Ok(out)
}

/// Every unordered pair for populations up to [`FULL_PAIR_LIMIT`];
/// otherwise [`SAMPLED_PAIRS`] distinct pairs drawn uniformly with `seed`.
/// Pairs come back as `(i, j)` with `i < j`, sorted.
pub fn sample_pairs(n_graphs: usize, seed: u64) -> Vec<(usize, usize)> {
    let all = n_graphs * n_graphs.saturating_sub(1) / 2;
    let decode = |mut k: usize| {
        let mut i = 0;
        while k >= n_graphs - 1 - i {
            k -= n_graphs - 1 - i;
            i += 1;
        }
        (i, i + 1 + k)
    };
    if n_graphs <= FULL_PAIR_LIMIT || all <= SAMPLED_PAIRS {
        return (0..all).map(decode).collect();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut picks = index::sample(&mut rng, all, SAMPLED_PAIRS).into_vec();
    picks.sort_unstable();
    picks.into_iter().map(decode).collect()
}

/// Elementwise `exp(−γ d)`.
pub fn kernel_from_distances(d: &DMatrix<f64>, gamma: f64) -> Result<DMatrix<f64>> {
    if !(gamma.is_finite() && gamma > 0.0) {
        return Err(GgdError::InvalidArgument(format!("kernel gamma must be positive, got {gamma}")));
    }
    Ok(d.map(|x| (-gamma * x).exp()))
}
