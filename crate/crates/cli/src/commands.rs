use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use ggd_core::coarsening::{coarsen_to_size, CoarsenOptions, CoarseningTrace};
use ggd_core::generators::connected_erdos_renyi;
use ggd_core::graph::io::{graph_to_json, load_feature_csv, load_graph_collection, load_graph_ref, save_graph_json};
use ggd_core::harness::{
    classification_trials, dataset_distance, distance_matrix, mean_std, pair_distances, perturb, perturbation_study,
    Method, PerturbKind, PerturbationSpec,
};
use ggd_core::matching::default_eta;
use ggd_core::output::{fmt_f64, matrix_to_csv, to_json_pretty};
use ggd_core::{compute_ggd, match_graphs, GgdError, Graph};
use nalgebra::DMatrix;
use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Map, Value};

use crate::config::RunConfig;

pub type Result<T> = std::result::Result<T, GgdError>;

fn io_err(path: &Path, source: std::io::Error) -> GgdError {
    GgdError::Io {
        path: path.display().to_string(),
        source,
    }
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| io_err(path, e))
}

/// `<out>.config.json`, written next to every non-JSON output.
pub fn sidecar_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".config.json");
    PathBuf::from(name)
}

/// Report object: the run configuration first, then `fields` in order.
fn report(config: &RunConfig, fields: Vec<(&str, Value)>) -> Value {
    let mut map = Map::new();
    map.insert("config".into(), config.to_value());
    for (k, v) in fields {
        map.insert(k.into(), v);
    }
    Value::Object(map)
}

fn emit(value: &Value, out: Option<&Path>) -> Result<()> {
    let mut text = to_json_pretty(value);
    text.push('\n');
    match out {
        Some(p) => write_file(p, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn graph_value(g: &Graph) -> Value {
    serde_json::from_str(&graph_to_json(g)).expect("graph JSON is valid")
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report types are serializable")
}

pub fn dist(config: &RunConfig, a: &str, b: &str, out: Option<&Path>) -> Result<()> {
    let (g1, g2) = (load_graph_ref(a)?, load_graph_ref(b)?);
    let result = compute_ggd(&g1, &g2, &config.params()?)?;
    for w in &result.warnings {
        eprintln!("warning: {w}");
    }
    emit(&report(config, vec![("inputs", json!([a, b])), ("result", to_value(&result))]), out)
}

pub fn match_cmd(config: &RunConfig, a: &str, b: &str, out: Option<&Path>) -> Result<()> {
    let (g1, g2) = (load_graph_ref(a)?, load_graph_ref(b)?);
    let eta = config.eta.unwrap_or_else(|| default_eta(g2.node_count()));
    let params = config.params()?;
    let perm = match_graphs(&g1, &g2, eta, params.rounding)?;
    emit(
        &report(
            config,
            vec![("inputs", json!([a, b])), ("eta", json!(eta)), ("permutation", json!(perm.as_slice()))],
        ),
        out,
    )
}

fn trace_csv(trace: &CoarseningTrace) -> String {
    let mut s = String::from("step,p,q,resistance,nodes\n");
    for (i, st) in trace.steps.iter().enumerate() {
        let _ = writeln!(s, "{},{},{},{},{}", i, st.p, st.q, fmt_f64(st.resistance), st.nodes);
    }
    s
}

pub fn coarsen(config: &RunConfig, input: &str, target: usize, out: Option<&Path>, trace_out: Option<&Path>) -> Result<()> {
    let g = load_graph_ref(input)?;
    let params = config.params()?;
    let opts = CoarsenOptions {
        alpha: params.alpha,
        mode: params.resistance,
        batch: params.batch,
    };
    let (coarse, trace) = coarsen_to_size(&g, target, &opts)?;
    if let Some(p) = trace_out {
        write_file(p, &trace_csv(&trace))?;
    }
    let summary = report(
        config,
        vec![
            ("input", json!(input)),
            ("input_nodes", json!(g.node_count())),
            ("target", json!(target)),
            ("trace", to_value(&trace.steps)),
            ("graph", graph_value(&coarse)),
        ],
    );
    match out {
        // the graph file stays loadable; the run record goes alongside
        Some(p) => {
            save_graph_json(&coarse, p)?;
            emit(&summary, Some(&sidecar_path(p)))
        }
        None => emit(&summary, None),
    }
}

fn matrix_values(config: &RunConfig, graphs: &[Graph]) -> Result<DMatrix<f64>> {
    let n = graphs.len();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let results = pair_distances(graphs, &pairs, &config.params()?, Some(config.threads))?;
    let mut values = DMatrix::zeros(n, n);
    let mut first_err = None;
    for (&(i, j), r) in pairs.iter().zip(results) {
        match r {
            Ok(d) => {
                values[(i, j)] = d;
                values[(j, i)] = d;
            }
            Err(e) => {
                eprintln!("error: {e}");
                first_err.get_or_insert(e);
            }
        }
    }
    match first_err {
        Some(e) => Err(e),
        None => Ok(values),
    }
}

pub fn matrix(config: &RunConfig, dataset: &str, normalize: bool, out: Option<&Path>) -> Result<()> {
    let graphs = load_graph_collection(dataset)?;
    let mut values = matrix_values(config, &graphs)?;
    let max = values.max();
    if normalize && max > 0.0 {
        values /= max;
    }
    let csv = matrix_to_csv(&values);
    match out {
        Some(p) => {
            write_file(p, &csv)?;
            let meta = report(
                config,
                vec![
                    ("dataset", json!(dataset)),
                    ("graphs", json!(graphs.len())),
                    ("normalized", json!(normalize)),
                ],
            );
            emit(&meta, Some(&sidecar_path(p)))
        }
        None => {
            print!("{csv}");
            Ok(())
        }
    }
}

fn labels_of(graphs: &[Graph], dataset: &str) -> Result<Vec<i64>> {
    graphs
        .iter()
        .enumerate()
        .map(|(i, g)| {
            g.label().ok_or_else(|| GgdError::Parse {
                context: dataset.to_string(),
                message: format!("graph {i} has no class label"),
            })
        })
        .collect()
}

pub struct ClassifyArgs {
    pub method: Method,
    pub trials: usize,
    pub test_fraction: f64,
}

pub fn classify(config: &RunConfig, dataset: &str, args: &ClassifyArgs, out: Option<&Path>) -> Result<()> {
    let graphs = load_graph_collection(dataset)?;
    let labels = labels_of(&graphs, dataset)?;
    let d = distance_matrix(&graphs, &config.params()?, Some(config.threads))?;
    let rep = classification_trials(&d.values, &labels, &args.method, args.trials, args.test_fraction, config.seed)?;
    eprintln!("accuracy: {:.4} ± {:.4} over {} trials", rep.mean, rep.std, rep.trials.len());
    emit(
        &report(
            config,
            vec![("dataset", json!(dataset)), ("graphs", json!(graphs.len())), ("report", to_value(&rep))],
        ),
        out,
    )
}

pub fn perturb_cmd(config: &RunConfig, input: &str, kind: PerturbKind, amount: usize, out: Option<&Path>) -> Result<()> {
    let g = load_graph_ref(input)?;
    let spec = PerturbationSpec {
        kind,
        amount,
        seed: config.seed,
    };
    let h = perturb(&g, &spec)?;
    let summary = report(
        config,
        vec![
            ("input", json!(input)),
            ("perturbation", to_value(&spec)),
            ("graph", graph_value(&h)),
        ],
    );
    match out {
        Some(p) => {
            save_graph_json(&h, p)?;
            emit(&summary, Some(&sidecar_path(p)))
        }
        None => emit(&summary, None),
    }
}

pub fn perturb_study(
    config: &RunConfig,
    dataset: &str,
    kind: PerturbKind,
    amount: usize,
    points_out: Option<&Path>,
    out: Option<&Path>,
) -> Result<()> {
    let graphs = load_graph_collection(dataset)?;
    let spec = PerturbationSpec {
        kind,
        amount,
        seed: config.seed,
    };
    let study = perturbation_study(&graphs, &spec, &config.params()?, Some(config.threads))?;
    if let Some(p) = points_out {
        let mut csv = String::from("i,j,before,after\n");
        for (&(i, j), &(b, a)) in study.pairs.iter().zip(&study.points) {
            let _ = writeln!(csv, "{i},{j},{},{}", fmt_f64(b), fmt_f64(a));
        }
        write_file(p, &csv)?;
    }
    emit(
        &report(
            config,
            vec![
                ("dataset", json!(dataset)),
                ("perturbation", to_value(&spec)),
                ("pairs", json!(study.pairs.len())),
                ("correlation", json!(study.correlation)),
            ],
        ),
        out,
    )
}

pub fn dataset_dist(config: &RunConfig, a: &str, b: &str, k: usize, prune: f64, out: Option<&Path>) -> Result<()> {
    let (fa, fb) = (load_feature_csv(a)?, load_feature_csv(b)?);
    let result = dataset_distance(&fa, &fb, k, prune, &config.params()?)?;
    emit(
        &report(
            config,
            vec![
                ("inputs", json!([a, b])),
                ("knn", json!(k)),
                ("prune_fraction", json!(prune)),
                ("result", to_value(&result)),
            ],
        ),
        out,
    )
}

pub struct BenchArgs {
    pub dataset: Option<String>,
    pub pairs: usize,
    pub nodes: usize,
    pub repetitions: usize,
}

/// Pairs drawn with replacement from a collection, or fresh connected random
/// graphs of the requested size.
fn bench_pairs(config: &RunConfig, args: &BenchArgs) -> Result<Vec<(Graph, Graph)>> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    match &args.dataset {
        Some(path) => {
            let graphs = load_graph_collection(path)?;
            if graphs.len() < 2 {
                return Err(GgdError::InvalidArgument("benchmark needs at least two graphs".into()));
            }
            Ok((0..args.pairs)
                .map(|_| {
                    let picked = index::sample(&mut rng, graphs.len(), 2);
                    (graphs[picked.index(0)].clone(), graphs[picked.index(1)].clone())
                })
                .collect())
        }
        None => {
            if args.nodes < 2 {
                return Err(GgdError::InvalidArgument("--nodes must be at least 2".into()));
            }
            Ok((0..args.pairs)
                .map(|_| {
                    let n1 = rng.random_range(args.nodes.saturating_sub(2).max(2)..=args.nodes + 2);
                    let n2 = rng.random_range(args.nodes.saturating_sub(2).max(2)..=args.nodes + 2);
                    (connected_erdos_renyi(n1, &mut rng), connected_erdos_renyi(n2, &mut rng))
                })
                .collect())
        }
    }
}

pub fn bench(config: &RunConfig, args: &BenchArgs, out: Option<&Path>) -> Result<()> {
    if args.pairs == 0 || args.repetitions == 0 {
        return Err(GgdError::InvalidArgument("--pairs and --repetitions must be positive".into()));
    }
    let params = config.params()?;
    let pairs = bench_pairs(config, args)?;
    let mut totals = Vec::with_capacity(args.repetitions);
    for _ in 0..args.repetitions {
        let start = Instant::now();
        for (a, b) in &pairs {
            compute_ggd(a, b, &params)?;
        }
        totals.push(start.elapsed().as_secs_f64());
    }
    let per_pair_ms: Vec<f64> = totals.iter().map(|t| 1e3 * t / pairs.len() as f64).collect();
    let (mean_s, std_s) = mean_std(&totals);
    let (mean_ms, std_ms) = mean_std(&per_pair_ms);
    eprintln!(
        "{} pairs: {:.3} ± {:.3} s total, {:.3} ± {:.3} ms per pair",
        pairs.len(),
        mean_s,
        std_s,
        mean_ms,
        std_ms
    );
    emit(
        &report(
            config,
            vec![
                ("dataset", json!(args.dataset)),
                ("pairs", json!(pairs.len())),
                ("repetitions", json!(args.repetitions)),
                ("total_seconds", json!({"mean": mean_s, "std": std_s})),
                ("per_pair_ms", json!({"mean": mean_ms, "std": std_ms})),
            ],
        ),
        out,
    )
}
