use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use ggd_core::generators::{connected_erdos_renyi, ring};
use ggd_core::graph::io::{save_graph_json, save_graph_list_json};
use ggd_core::Graph;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::Value;
use tempfile::TempDir;

fn ggd(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ggd"))
        .args(args)
        .current_dir(cwd)
        .env_remove("GGD_THREADS")
        .output()
        .expect("binary runs")
}

fn ok_json(args: &[&str], cwd: &Path) -> Value {
    let out = ggd(args, cwd);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

struct Fixture {
    dir: TempDir,
}

impl Fixture {
    fn new() -> Self {
        let dir = tempfile::tempdir().unwrap();
        let f = Fixture { dir };
        f.graph("k2a.json", &Graph::new(2, [(0, 1, 1.0)]).unwrap());
        f.graph("k2b.json", &Graph::new(2, [(0, 1, 2.0)]).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        f.graph("er14.json", &connected_erdos_renyi(14, &mut rng));
        f.graph("er10.json", &connected_erdos_renyi(10, &mut rng));
        f.graph("split.json", &Graph::new(4, [(0, 1, 1.0), (2, 3, 1.0)]).unwrap());
        let three = vec![ring(6), connected_erdos_renyi(7, &mut rng), connected_erdos_renyi(8, &mut rng)];
        save_graph_list_json(&three, f.path("three.json")).unwrap();
        f
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    fn cwd(&self) -> &Path {
        self.dir.path()
    }

    fn graph(&self, name: &str, g: &Graph) {
        save_graph_json(g, self.path(name)).unwrap();
    }

    fn read(&self, name: &str) -> String {
        fs::read_to_string(self.path(name)).unwrap()
    }
}

fn distance(v: &Value) -> f64 {
    v["result"]["distance"].as_f64().unwrap()
}

#[test]
fn dist_examples() {
    let f = Fixture::new();
    let same = ok_json(&["dist", "er14.json", "er14.json"], f.cwd());
    assert!(distance(&same).abs() < 1e-9);
    assert_eq!(same["config"]["variant"], "airm");

    // spectrum {1, (2 + ε)/(1 + ε)} at ε = 1e-4
    let k2 = ok_json(&["dist", "k2a.json", "k2b.json"], f.cwd());
    assert!((distance(&k2) - 0.6931222).abs() < 1e-6, "{}", distance(&k2));

    let mismatch = ok_json(&["dist", "er10.json", "er14.json"], f.cwd());
    let steps = mismatch["result"]["coarsening_trace"]["steps"].as_array().unwrap();
    assert_eq!(steps.len(), 4);
    assert_eq!(mismatch["result"]["swapped"], true);
}

#[test]
fn dist_options_and_replay() {
    let f = Fixture::new();
    let lerm = ok_json(&["dist", "er10.json", "er14.json", "--variant", "lerm"], f.cwd());
    assert_eq!(lerm["result"]["variant"]["name"], "lerm");
    let approx = ok_json(&["dist", "er10.json", "er14.json", "--approx-k", "2"], f.cwd());
    assert_eq!(approx["result"]["spectrum"].as_array().unwrap().len(), 4);

    let out = ggd(&["dist", "er10.json", "er14.json", "--variant", "normalized"], f.cwd());
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("warning"));

    // replaying the embedded configuration reproduces the output exactly
    let first = ggd(&["dist", "er10.json", "er14.json", "--epsilon", "1e-3", "--out", "first.json"], f.cwd());
    assert!(first.status.success());
    let again = ggd(&["--config", "first.json", "dist", "er10.json", "er14.json", "--out", "again.json"], f.cwd());
    assert!(again.status.success());
    assert_eq!(f.read("first.json"), f.read("again.json"));
    assert!(f.read("again.json").contains("1.0000000000000000e-3"));
}

#[test]
fn matrix_is_deterministic() {
    let f = Fixture::new();
    for (name, threads) in [("a.csv", "1"), ("b.csv", "1"), ("c.csv", "8")] {
        let out = ggd(&["matrix", "three.json", "--threads", threads, "--out", name], f.cwd());
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let csv = f.read("a.csv");
    assert_eq!(csv, f.read("b.csv"));
    assert_eq!(csv, f.read("c.csv"));

    let rows: Vec<Vec<f64>> = csv
        .lines()
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 3);
    for i in 0..3 {
        assert_eq!(rows[i].len(), 3);
        assert_eq!(rows[i][i], 0.0);
        for j in 0..3 {
            assert_eq!(rows[i][j], rows[j][i]);
        }
    }

    let sidecar: Value = serde_json::from_str(&f.read("a.csv.config.json")).unwrap();
    assert_eq!(sidecar["graphs"], 3);
    assert!(ggd(&["--config", "a.csv.config.json", "matrix", "three.json", "--out", "d.csv"], f.cwd()).status.success());
    assert_eq!(csv, f.read("d.csv"));
}

#[test]
fn matrix_withholds_output_on_pair_failure() {
    let f = Fixture::new();
    let graphs = vec![ring(5), Graph::new(4, [(0, 1, 1.0), (2, 3, 1.0)]).unwrap(), ring(6)];
    save_graph_list_json(&graphs, f.path("bad.json")).unwrap();
    let out = ggd(&["matrix", "bad.json", "--out", "bad.csv"], f.cwd());
    assert_eq!(code(&out), 4);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("pair (0, 1)") && err.contains("pair (1, 2)"), "{err}");
    assert!(!f.path("bad.csv").exists());

    let out = ggd(&["matrix", "bad.json", "--giant-component", "--out", "bad.csv"], f.cwd());
    assert!(out.status.success());
}

#[test]
fn exit_codes() {
    let f = Fixture::new();
    assert_eq!(code(&ggd(&["dist", "k2a.json"], f.cwd())), 1);
    assert_eq!(code(&ggd(&["dist", "k2a.json", "k2b.json", "--epsilon", "-1"], f.cwd())), 1);
    assert_eq!(code(&ggd(&["dist", "k2a.json", "k2b.json", "--resistance", "krylov:x"], f.cwd())), 1);
    assert_eq!(code(&ggd(&["--help"], f.cwd())), 0);
    assert_eq!(code(&ggd(&["dist", "k2a.json", "missing.json"], f.cwd())), 2);
    fs::write(f.path("broken.json"), "{\"n\": 2, \"edges\": [[0, 5, 1.0]]}").unwrap();
    assert_eq!(code(&ggd(&["dist", "k2a.json", "broken.json"], f.cwd())), 2);
    assert_eq!(code(&ggd(&["dist", "k2a.json", "split.json"], f.cwd())), 4);
    assert_eq!(code(&ggd(&["match", "k2a.json", "er10.json"], f.cwd())), 4);
    assert_eq!(code(&ggd(&["coarsen", "er10.json", "--target", "12"], f.cwd())), 1);
    assert_eq!(code(&ggd(&["perturb", "k2a.json", "--kind", "edge-add"], f.cwd())), 4);
}

#[test]
fn match_and_coarsen() {
    let f = Fixture::new();
    let m = ok_json(&["match", "er10.json", "er10.json"], f.cwd());
    let perm: Vec<u64> = m["permutation"].as_array().unwrap().iter().map(|x| x.as_u64().unwrap()).collect();
    assert_eq!(perm, (0..10).collect::<Vec<_>>());
    assert_eq!(m["eta"].as_f64(), Some(0.5));

    let out = ggd(&["coarsen", "er14.json", "--target", "9", "--out", "c.json", "--trace", "c.csv"], f.cwd());
    assert!(out.status.success());
    let coarse: Value = serde_json::from_str(&f.read("c.json")).unwrap();
    assert_eq!(coarse["n"], 9);
    let trace = f.read("c.csv");
    assert_eq!(trace.lines().next(), Some("step,p,q,resistance,nodes"));
    assert_eq!(trace.lines().count(), 6);
    let meta: Value = serde_json::from_str(&f.read("c.json.config.json")).unwrap();
    assert_eq!(meta["input_nodes"], 14);
    // the written graph is a valid input again
    assert!(ggd(&["dist", "c.json", "er10.json"], f.cwd()).status.success());
}

#[test]
fn perturb_is_reproducible() {
    let f = Fixture::new();
    for name in ["p1.json", "p2.json"] {
        let out = ggd(&["perturb", "er14.json", "--kind", "edge-add", "--amount", "3", "--seed", "5", "--out", name], f.cwd());
        assert!(out.status.success());
    }
    assert_eq!(f.read("p1.json"), f.read("p2.json"));
    let g: Value = serde_json::from_str(&f.read("p1.json")).unwrap();
    let base: Value = serde_json::from_str(&f.read("er14.json")).unwrap();
    assert_eq!(g["edges"].as_array().unwrap().len(), base["edges"].as_array().unwrap().len() + 3);

    let other = ok_json(&["perturb", "er14.json", "--kind", "edge-add", "--amount", "3", "--seed", "6"], f.cwd());
    assert_ne!(other["graph"], g);
}

/// Rings against random graphs of the same sizes, ten of each.
fn two_class_fixture(path: &Path) {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut graphs = Vec::new();
    for i in 0..10 {
        graphs.push(ring(10 + i % 5).with_label(Some(0)));
        graphs.push(connected_erdos_renyi(10 + i % 5, &mut rng).with_label(Some(1)));
    }
    save_graph_list_json(&graphs, path).unwrap();
}

#[test]
fn classify_two_classes() {
    let f = Fixture::new();
    two_class_fixture(&f.path("two.json"));
    let knn = ok_json(&["classify", "two.json", "--trials", "5", "--test-fraction", "0.3"], f.cwd());
    let mean = knn["report"]["mean"].as_f64().unwrap();
    assert!(mean >= 0.9, "{mean}");
    assert_eq!(knn["report"]["trials"].as_array().unwrap().len(), 5);

    let svm = ok_json(&["classify", "two.json", "--method", "svm", "--trials", "3", "--test-fraction", "0.3"], f.cwd());
    assert!(svm["report"]["mean"].as_f64().unwrap() >= 0.9);

    // unlabelled collections cannot be classified
    assert_eq!(code(&ggd(&["classify", "three.json"], f.cwd())), 2);
}

#[test]
fn perturb_study_writes_point_cloud() {
    let f = Fixture::new();
    two_class_fixture(&f.path("two.json"));
    let v = ok_json(
        &["perturb-study", "two.json", "--kind", "edge-drop", "--amount", "0", "--points", "pts.csv"],
        f.cwd(),
    );
    assert_eq!(v["pairs"], 190);
    assert_eq!(v["correlation"].as_f64(), Some(1.0));
    let pts = f.read("pts.csv");
    assert_eq!(pts.lines().count(), 191);
    let first: Vec<&str> = pts.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(first[2], first[3]);
}

#[test]
fn dataset_distance_from_csv() {
    let f = Fixture::new();
    let cloud: String = (0..12).map(|i| format!("{},{}\n", i as f64, ((i * 7) % 5) as f64 * 0.3)).collect();
    fs::write(f.path("a.csv"), &cloud).unwrap();
    let v = ok_json(&["dataset-dist", "a.csv", "a.csv", "--knn", "3", "--prune", "0.2"], f.cwd());
    assert!(distance(&v).abs() < 1e-6);
    assert_eq!(v["knn"], 3);
    assert_eq!(code(&ggd(&["dataset-dist", "a.csv", "a.csv", "--knn", "30"], f.cwd())), 1);
}

#[test]
fn bench_reports_mean_and_std() {
    let f = Fixture::new();
    let v = ok_json(&["bench", "--pairs", "5", "--repetitions", "2"], f.cwd());
    assert_eq!(v["pairs"], 5);
    let ms = v["per_pair_ms"]["mean"].as_f64().unwrap();
    assert!(ms > 0.0 && v["per_pair_ms"]["std"].as_f64().unwrap() >= 0.0);
    let from_file = ok_json(&["bench", "three.json", "--pairs", "4", "--repetitions", "1"], f.cwd());
    assert_eq!(from_file["pairs"], 4);
}
