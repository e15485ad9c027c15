//! `ggd`: graph geodesic distances from the command line.
//!
//! Exit codes: 0 success, 1 usage, 2 parse or i/o, 3 numerical failure,
//! 4 infeasible input (disconnected graph, impossible size).

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use ggd_core::harness::{Method, PerturbKind};
use ggd_core::{ErrorClass, GgdError};

use commands::{BenchArgs, ClassifyArgs};
use config::ConfigArgs;

#[derive(Debug, Parser)]
#[command(name = "ggd", version, about = "Graph geodesic distance between weighted undirected graphs")]
struct Cli {
    #[command(flatten)]
    config: ConfigArgs,
    /// Write the primary output here instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MethodArg {
    Knn,
    Svm,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum KindArg {
    NodeDrop,
    NodeAdd,
    EdgeDrop,
    EdgeAdd,
}

impl From<KindArg> for PerturbKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::NodeDrop => PerturbKind::NodeDrop,
            KindArg::NodeAdd => PerturbKind::NodeAdd,
            KindArg::EdgeDrop => PerturbKind::EdgeDrop,
            KindArg::EdgeAdd => PerturbKind::EdgeAdd,
        }
    }
}

/// Graph arguments are JSON graph files or `dataset#index` (0-based) into a
/// TUDataset directory or JSON graph list.
#[derive(Debug, Subcommand)]
enum Command {
    /// Distance between two graphs, with the full result record.
    Dist { a: String, b: String },
    /// Node correspondence between two equal-sized graphs.
    Match { a: String, b: String },
    /// Contract a graph down to `target` nodes.
    Coarsen {
        graph: String,
        #[arg(long)]
        target: usize,
        /// Contraction trace as CSV.
        #[arg(long, value_name = "PATH")]
        trace: Option<PathBuf>,
    },
    /// Pairwise distance matrix of a collection as CSV.
    Matrix {
        dataset: String,
        /// Scale so the largest distance is one.
        #[arg(long)]
        normalize: bool,
    },
    /// Repeated stratified train/test classification from distances.
    Classify {
        dataset: String,
        #[arg(long, value_enum, default_value = "knn")]
        method: MethodArg,
        /// Neighbours for knn.
        #[arg(long, default_value_t = 1)]
        k: usize,
        /// Kernel width for svm; chosen by cross-validation when absent.
        #[arg(long)]
        gamma: Option<f64>,
        /// Soft-margin constant for svm.
        #[arg(long, default_value_t = 1.0)]
        c: f64,
        #[arg(long, default_value_t = 10)]
        trials: usize,
        #[arg(long, default_value_t = 0.1)]
        test_fraction: f64,
    },
    /// Seeded random perturbation of one graph.
    Perturb {
        graph: String,
        #[arg(long, value_enum)]
        kind: KindArg,
        #[arg(long, default_value_t = 1)]
        amount: usize,
    },
    /// Correlation of pairwise distances before and after perturbing a
    /// population.
    PerturbStudy {
        dataset: String,
        #[arg(long, value_enum)]
        kind: KindArg,
        #[arg(long, default_value_t = 1)]
        amount: usize,
        /// Point cloud of (before, after) distances as CSV.
        #[arg(long, value_name = "PATH")]
        points: Option<PathBuf>,
    },
    /// Distance between two point clouds (headerless CSV, one row per
    /// sample) through their pruned kNN graphs.
    DatasetDist {
        a: String,
        b: String,
        #[arg(long, default_value_t = 10)]
        knn: usize,
        /// Fraction of kNN edges removed by spectral pruning.
        #[arg(long, default_value_t = 0.0)]
        prune: f64,
    },
    /// Wall-clock time per distance over repeated runs.
    Bench {
        /// Draw pairs from this collection instead of random graphs.
        dataset: Option<String>,
        #[arg(long, default_value_t = 100)]
        pairs: usize,
        /// Size of the random graphs (each within ±2).
        #[arg(long, default_value_t = 18)]
        nodes: usize,
        #[arg(long, default_value_t = 3)]
        repetitions: usize,
    },
}

fn exit_code(class: ErrorClass) -> u8 {
    match class {
        ErrorClass::Usage => 1,
        ErrorClass::Parse => 2,
        ErrorClass::Numerical => 3,
        ErrorClass::Infeasible => 4,
    }
}

fn run(cli: Cli) -> Result<(), GgdError> {
    let config = cli.config.resolve()?;
    let out = cli.out.as_deref();
    match cli.command {
        Command::Dist { a, b } => commands::dist(&config, &a, &b, out),
        Command::Match { a, b } => commands::match_cmd(&config, &a, &b, out),
        Command::Coarsen { graph, target, trace } => commands::coarsen(&config, &graph, target, out, trace.as_deref()),
        Command::Matrix { dataset, normalize } => commands::matrix(&config, &dataset, normalize, out),
        Command::Classify {
            dataset,
            method,
            k,
            gamma,
            c,
            trials,
            test_fraction,
        } => {
            let method = match method {
                MethodArg::Knn => Method::Knn { k },
                MethodArg::Svm => Method::Svm { gamma, c },
            };
            let args = ClassifyArgs {
                method,
                trials,
                test_fraction,
            };
            commands::classify(&config, &dataset, &args, out)
        }
        Command::Perturb { graph, kind, amount } => commands::perturb_cmd(&config, &graph, kind.into(), amount, out),
        Command::PerturbStudy {
            dataset,
            kind,
            amount,
            points,
        } => commands::perturb_study(&config, &dataset, kind.into(), amount, points.as_deref(), out),
        Command::DatasetDist { a, b, knn, prune } => commands::dataset_dist(&config, &a, &b, knn, prune, out),
        Command::Bench {
            dataset,
            pairs,
            nodes,
            repetitions,
        } => {
            let args = BenchArgs {
                dataset,
                pairs,
                nodes,
                repetitions,
            };
            commands::bench(&config, &args, out)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // help and version go to stdout and are not errors
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(e.class()))
        }
    }
}
