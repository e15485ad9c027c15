pub mod coarsening;
pub mod error;
pub mod generators;
pub mod ggd;
pub mod graph;
pub mod harness;
pub mod matching;
pub mod output;
pub mod spectral;

pub use coarsening::{coarsen_to_size, CoarsenOptions, CoarseningTrace, ResistanceMode};
pub use error::{ErrorClass, GgdError, Result};
pub use ggd::{compute_ggd, GgdParams, GgdResult, Variant};
pub use graph::{Graph, Permutation};
pub use matching::{match_graphs, Rounding};
