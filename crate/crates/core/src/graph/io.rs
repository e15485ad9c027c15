//! Graph file formats: the JSON graph format and TUDataset directories.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::Graph;
use crate::error::{GgdError, Result};
use crate::output;

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphFile {
    n: usize,
    edges: Vec<(usize, usize, f64)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    features: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    label: Option<i64>,
}

impl GraphFile {
    fn from_graph(g: &Graph) -> Self {
        GraphFile {
            n: g.node_count(),
            edges: g.edges().iter().map(|e| (e.u, e.v, e.w)).collect(),
            features: g.features().map(<[_]>::to_vec),
            label: g.label(),
        }
    }

    fn into_graph(self) -> Result<Graph> {
        let mut g = Graph::new(self.n, self.edges)?;
        if let Some(f) = self.features {
            g = g.with_features(f)?;
        }
        Ok(g.with_label(self.label))
    }
}

fn io_err(path: &Path, source: std::io::Error) -> GgdError {
    GgdError::Io {
        path: path.display().to_string(),
        source,
    }
}

pub fn graph_to_json(g: &Graph) -> String {
    let value = serde_json::to_value(GraphFile::from_graph(g)).expect("graph is serializable");
    output::to_json_string(&value)
}

pub fn graph_from_json(text: &str) -> Result<Graph> {
    let file: GraphFile =
        serde_json::from_str(text).map_err(|e| GgdError::parse("graph JSON", e.to_string()))?;
    file.into_graph()
}

pub fn save_graph_json(g: &Graph, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut text = graph_to_json(g);
    text.push('\n');
    fs::write(path, text).map_err(|e| io_err(path, e))
}

pub fn load_graph_json(path: impl AsRef<Path>) -> Result<Graph> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    graph_from_json(&text).map_err(|e| match e {
        GgdError::Parse { message, .. } => GgdError::parse(path.display().to_string(), message),
        other => other,
    })
}

/// Reads a JSON file holding an array of graphs.
pub fn load_graph_list_json(path: impl AsRef<Path>) -> Result<Vec<Graph>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let files: Vec<GraphFile> = serde_json::from_str(&text)
        .map_err(|e| GgdError::parse(path.display().to_string(), e.to_string()))?;
    files.into_iter().map(GraphFile::into_graph).collect()
}

pub fn save_graph_list_json(graphs: &[Graph], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let value = serde_json::Value::Array(
        graphs
            .iter()
            .map(|g| serde_json::to_value(GraphFile::from_graph(g)).expect("serializable"))
            .collect(),
    );
    let mut text = output::to_json_string(&value);
    text.push('\n');
    fs::write(path, text).map_err(|e| io_err(path, e))
}

/// Finds the `<DS>` prefix of a TUDataset directory via its `<DS>_A.txt`.
fn tudataset_prefix(dir: &Path) -> Result<String> {
    let entries = fs::read_dir(dir).map_err(|e| io_err(dir, e))?;
    let mut prefixes: Vec<String> = entries
        .filter_map(|e| e.ok())
        .filter_map(|e| e.file_name().to_str().map(str::to_owned))
        .filter_map(|name| name.strip_suffix("_A.txt").map(str::to_owned))
        .collect();
    prefixes.sort();
    prefixes.into_iter().next().ok_or_else(|| {
        GgdError::parse(dir.display().to_string(), "no <DS>_A.txt file in directory")
    })
}

pub fn is_tudataset_dir(dir: &Path) -> bool {
    dir.is_dir() && tudataset_prefix(dir).is_ok()
}

fn read_lines(path: &Path) -> Result<Vec<(usize, String)>> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    Ok(text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim().to_owned()))
        .filter(|(_, l)| !l.is_empty())
        .collect())
}

fn fields(line: &str) -> impl Iterator<Item = &str> {
    line.split(',').map(str::trim)
}

fn parse_int(token: &str, path: &Path, line: usize) -> Result<i64> {
    token.parse::<i64>().map_err(|_| {
        GgdError::parse(
            format!("{}:{line}", path.display()),
            format!("expected integer, found {token:?}"),
        )
    })
}

fn parse_float(token: &str, path: &Path, line: usize) -> Result<f64> {
    token.parse::<f64>().map_err(|_| {
        GgdError::parse(
            format!("{}:{line}", path.display()),
            format!("expected number, found {token:?}"),
        )
    })
}

fn read_int_column(path: &Path) -> Result<Vec<i64>> {
    read_lines(path)?
        .iter()
        .map(|(no, l)| parse_int(l, path, *no))
        .collect()
}

/// Loads every graph of a TUDataset directory.
///
/// Edges are 1-indexed global node ids; both directions are merged into one
/// undirected edge of weight 1 and self-loops are dropped. Node labels are
/// one-hot encoded over the sorted set of labels seen in the dataset; node
/// attributes, when present, are appended after the one-hot block.
pub fn load_tudataset(dir: impl AsRef<Path>) -> Result<Vec<Graph>> {
    let dir = dir.as_ref();
    let prefix = tudataset_prefix(dir)?;
    let file = |suffix: &str| -> PathBuf { dir.join(format!("{prefix}_{suffix}.txt")) };

    let indicator_path = file("graph_indicator");
    let labels_path = file("graph_labels");
    for p in [&indicator_path, &labels_path] {
        if !p.exists() {
            return Err(GgdError::parse(
                dir.display().to_string(),
                format!("missing mandatory file {}", p.display()),
            ));
        }
    }

    let indicator = read_int_column(&indicator_path)?;
    let graph_labels = read_int_column(&labels_path)?;
    let graph_count = graph_labels.len();
    let node_total = indicator.len();

    // global node -> (graph, local index)
    let mut local = vec![(0usize, 0usize); node_total];
    let mut sizes = vec![0usize; graph_count];
    for (node, &gid) in indicator.iter().enumerate() {
        if gid < 1 || gid as usize > graph_count {
            return Err(GgdError::parse(
                indicator_path.display().to_string(),
                format!("graph id {gid} out of range 1..={graph_count}"),
            ));
        }
        let gi = gid as usize - 1;
        local[node] = (gi, sizes[gi]);
        sizes[gi] += 1;
    }
    if let Some(empty) = sizes.iter().position(|&s| s == 0) {
        return Err(GgdError::parse(
            indicator_path.display().to_string(),
            format!("graph {} has no nodes", empty + 1),
        ));
    }

    let a_path = file("A");
    let mut edge_sets: Vec<BTreeSet<(usize, usize)>> = vec![BTreeSet::new(); graph_count];
    for (no, line) in read_lines(&a_path)? {
        let toks: Vec<&str> = fields(&line).collect();
        if toks.len() != 2 {
            return Err(GgdError::parse(
                format!("{}:{no}", a_path.display()),
                "expected two comma-separated node ids",
            ));
        }
        let i = parse_int(toks[0], &a_path, no)?;
        let j = parse_int(toks[1], &a_path, no)?;
        for id in [i, j] {
            if id < 1 || id as usize > node_total {
                return Err(GgdError::parse(
                    format!("{}:{no}", a_path.display()),
                    format!("node id {id} out of range 1..={node_total}"),
                ));
            }
        }
        let (gi, li) = local[i as usize - 1];
        let (gj, lj) = local[j as usize - 1];
        if gi != gj {
            return Err(GgdError::parse(
                format!("{}:{no}", a_path.display()),
                format!("edge ({i}, {j}) crosses graphs {} and {}", gi + 1, gj + 1),
            ));
        }
        if li != lj {
            edge_sets[gi].insert((li.min(lj), li.max(lj)));
        }
    }

    let node_labels_path = file("node_labels");
    let node_labels = if node_labels_path.exists() {
        let labels = read_int_column(&node_labels_path)?;
        if labels.len() != node_total {
            return Err(GgdError::parse(
                node_labels_path.display().to_string(),
                format!("{} labels for {node_total} nodes", labels.len()),
            ));
        }
        Some(labels)
    } else {
        None
    };

    let attr_path = file("node_attributes");
    let attributes = if attr_path.exists() {
        let rows: Vec<Vec<f64>> = read_lines(&attr_path)?
            .iter()
            .map(|(no, l)| fields(l).map(|t| parse_float(t, &attr_path, *no)).collect())
            .collect::<Result<_>>()?;
        if rows.len() != node_total {
            return Err(GgdError::parse(
                attr_path.display().to_string(),
                format!("{} attribute rows for {node_total} nodes", rows.len()),
            ));
        }
        Some(rows)
    } else {
        None
    };

    let features: Option<Vec<Vec<f64>>> = if node_labels.is_some() || attributes.is_some() {
        let vocab: Vec<i64> = node_labels
            .iter()
            .flatten()
            .copied()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        Some(
            (0..node_total)
                .map(|node| {
                    let mut f = Vec::new();
                    if let Some(labels) = &node_labels {
                        let pos = vocab.binary_search(&labels[node]).expect("label in vocab");
                        f.extend((0..vocab.len()).map(|k| if k == pos { 1.0 } else { 0.0 }));
                    }
                    if let Some(attrs) = &attributes {
                        f.extend_from_slice(&attrs[node]);
                    }
                    f
                })
                .collect(),
        )
    } else {
        None
    };

    let mut per_graph_features: Vec<Vec<Vec<f64>>> = vec![Vec::new(); graph_count];
    if let Some(f) = features {
        for (node, fv) in f.into_iter().enumerate() {
            per_graph_features[local[node].0].push(fv);
        }
    }

    let mut graphs = Vec::with_capacity(graph_count);
    for gi in 0..graph_count {
        let edges = edge_sets[gi].iter().map(|&(u, v)| (u, v, 1.0));
        let mut g = Graph::new(sizes[gi], edges)?;
        let f = std::mem::take(&mut per_graph_features[gi]);
        if !f.is_empty() {
            g = g.with_features(f)?;
        }
        graphs.push(g.with_label(Some(graph_labels[gi])));
    }
    Ok(graphs)
}

/// Resolves `path` or `dataset_dir#index` (0-based) to a single graph.
pub fn load_graph_ref(reference: &str) -> Result<Graph> {
    if let Some((dir, idx)) = reference.rsplit_once('#') {
        let index: usize = idx
            .parse()
            .map_err(|_| GgdError::parse(reference, "index after '#' must be an integer"))?;
        let dir = Path::new(dir);
        let mut graphs = if is_tudataset_dir(dir) {
            load_tudataset(dir)?
        } else {
            load_graph_list_json(dir)?
        };
        if index >= graphs.len() {
            return Err(GgdError::InvalidArgument(format!(
                "index {index} out of range for {} graphs",
                graphs.len()
            )));
        }
        Ok(graphs.swap_remove(index))
    } else {
        load_graph_json(reference)
    }
}

/// Loads a graph collection: a TUDataset directory, a directory of `.json`
/// graph files (sorted by name), or a JSON file holding an array of graphs.
pub fn load_graph_collection(path: impl AsRef<Path>) -> Result<Vec<Graph>> {
    let path = path.as_ref();
    if is_tudataset_dir(path) {
        return load_tudataset(path);
    }
    if path.is_dir() {
        let mut files: Vec<PathBuf> = fs::read_dir(path)
            .map_err(|e| io_err(path, e))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "json"))
            .collect();
        files.sort();
        return files.iter().map(load_graph_json).collect();
    }
    load_graph_list_json(path)
}

/// Headerless CSV, one row per sample.
pub fn load_feature_csv(path: impl AsRef<Path>) -> Result<DMatrix<f64>> {
    let path = path.as_ref();
    let rows: Vec<Vec<f64>> = read_lines(path)?
        .iter()
        .map(|(no, l)| fields(l).map(|t| parse_float(t, path, *no)).collect())
        .collect::<Result<_>>()?;
    let Some(first) = rows.first() else {
        return Err(GgdError::parse(path.display().to_string(), "empty feature file"));
    };
    let d = first.len();
    if rows.iter().any(|r| r.len() != d) {
        return Err(GgdError::parse(path.display().to_string(), "ragged feature rows"));
    }
    Ok(DMatrix::from_fn(rows.len(), d, |i, j| rows[i][j]))
}

pub fn save_matrix_csv(m: &DMatrix<f64>, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, output::matrix_to_csv(m)).map_err(|e| io_err(path, e))
}
