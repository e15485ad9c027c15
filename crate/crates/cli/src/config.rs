//! Run configuration shared by every subcommand and embedded in every
//! output, so any run can be replayed with `--config <output>`.

use std::fs;
use std::path::Path;

use clap::{Args, ValueEnum};
use ggd_core::coarsening::ResistanceMode;
use ggd_core::graph::DEFAULT_EPSILON;
use ggd_core::{GgdError, GgdParams, Rounding, Variant};
use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VariantArg {
    Airm,
    Lerm,
    Normalized,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RoundingArg {
    Lap,
    Greedy,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub epsilon: f64,
    /// `None` picks the bandwidth from the matched size.
    pub eta: Option<f64>,
    pub alpha: f64,
    pub variant: VariantArg,
    /// Extreme eigenvalue pairs for the approximate distance; `None` uses
    /// the full spectrum.
    pub approx_k: Option<usize>,
    pub rounding: RoundingArg,
    pub resistance: String,
    pub batch: usize,
    pub giant_component: bool,
    pub seed: u64,
    pub threads: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            epsilon: DEFAULT_EPSILON,
            eta: None,
            alpha: 0.0,
            variant: VariantArg::Airm,
            approx_k: None,
            rounding: RoundingArg::Lap,
            resistance: "auto".into(),
            batch: 1,
            giant_component: false,
            seed: 0,
            threads: std::thread::available_parallelism().map_or(1, |n| n.get()),
        }
    }
}

/// Flags accepted by every subcommand; each one overrides the value from
/// `--config`, which overrides the defaults.
#[derive(Debug, Clone, Default, Args)]
pub struct ConfigArgs {
    /// Replay the run configuration embedded in a previous output (or a bare
    /// configuration object).
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<String>,
    /// Diagonal shift of the modified Laplacian.
    #[arg(long, global = true)]
    pub epsilon: Option<f64>,
    /// Matching bandwidth (default 0.5 below 100 nodes, else 0.2).
    #[arg(long, global = true)]
    pub eta: Option<f64>,
    /// Weight of the feature term in coarsening scores.
    #[arg(long, global = true)]
    pub alpha: Option<f64>,
    #[arg(long, global = true, value_enum)]
    pub variant: Option<VariantArg>,
    /// Use only this many largest and smallest eigenvalue pairs (airm only).
    #[arg(long, global = true, value_name = "K")]
    pub approx_k: Option<usize>,
    #[arg(long, global = true, value_enum)]
    pub rounding: Option<RoundingArg>,
    /// auto, exact or krylov:M.
    #[arg(long, global = true, value_name = "MODE")]
    pub resistance: Option<String>,
    /// Edges contracted per coarsening round.
    #[arg(long, global = true)]
    pub batch: Option<usize>,
    /// Replace disconnected inputs by their largest component.
    #[arg(long, global = true)]
    pub giant_component: bool,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true, env = "GGD_THREADS")]
    pub threads: Option<usize>,
}

fn usage(msg: String) -> GgdError {
    GgdError::InvalidArgument(msg)
}

fn load_config_file(path: &Path) -> Result<RunConfig, GgdError> {
    let text = fs::read_to_string(path).map_err(|source| GgdError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let parse = |e: serde_json::Error| GgdError::Parse {
        context: path.display().to_string(),
        message: e.to_string(),
    };
    let value: Value = serde_json::from_str(&text).map_err(parse)?;
    // outputs carry the configuration under "config"
    let inner = match value {
        Value::Object(mut map) if map.contains_key("config") => map.remove("config").unwrap_or(Value::Null),
        other => other,
    };
    serde_json::from_value(inner).map_err(parse)
}

impl ConfigArgs {
    pub fn resolve(&self) -> Result<RunConfig, GgdError> {
        let mut c = match &self.config {
            Some(p) => load_config_file(Path::new(p))?,
            None => RunConfig::default(),
        };
        if let Some(x) = self.epsilon {
            c.epsilon = x;
        }
        if self.eta.is_some() {
            c.eta = self.eta;
        }
        if let Some(x) = self.alpha {
            c.alpha = x;
        }
        if let Some(x) = self.variant {
            c.variant = x;
        }
        if self.approx_k.is_some() {
            c.approx_k = self.approx_k;
        }
        if let Some(x) = self.rounding {
            c.rounding = x;
        }
        if let Some(x) = &self.resistance {
            c.resistance = x.clone();
        }
        if let Some(x) = self.batch {
            c.batch = x;
        }
        c.giant_component |= self.giant_component;
        if let Some(x) = self.seed {
            c.seed = x;
        }
        if let Some(x) = self.threads {
            c.threads = x;
        }
        c.validate()?;
        Ok(c)
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), GgdError> {
        if !(self.epsilon.is_finite() && self.epsilon > 0.0) {
            return Err(usage(format!("--epsilon must be positive, got {}", self.epsilon)));
        }
        if let Some(eta) = self.eta {
            if !(eta.is_finite() && eta > 0.0) {
                return Err(usage(format!("--eta must be positive, got {eta}")));
            }
        }
        if !(self.alpha.is_finite() && self.alpha >= 0.0) {
            return Err(usage(format!("--alpha must be non-negative, got {}", self.alpha)));
        }
        match self.approx_k {
            Some(0) => return Err(usage("--approx-k must be at least 1".into())),
            Some(_) if self.variant != VariantArg::Airm => {
                return Err(usage("--approx-k applies to the airm variant only".into()))
            }
            _ => {}
        }
        if self.batch == 0 {
            return Err(usage("--batch must be at least 1".into()));
        }
        if self.threads == 0 {
            return Err(usage("--threads must be at least 1".into()));
        }
        self.resistance.parse::<ResistanceMode>()?;
        Ok(())
    }

    pub fn params(&self) -> Result<GgdParams, GgdError> {
        let variant = match (self.variant, self.approx_k) {
            (VariantArg::Airm, Some(k)) => Variant::AirmApprox { k },
            (VariantArg::Airm, None) => Variant::Airm,
            (VariantArg::Lerm, _) => Variant::Lerm,
            (VariantArg::Normalized, _) => Variant::AirmNormalized,
        };
        Ok(GgdParams {
            epsilon: self.epsilon,
            eta: self.eta,
            alpha: self.alpha,
            variant,
            rounding: match self.rounding {
                RoundingArg::Lap => Rounding::Lap,
                RoundingArg::Greedy => Rounding::Greedy,
            },
            resistance: self.resistance.parse()?,
            batch: self.batch,
            giant_component: self.giant_component,
        })
    }

    pub fn to_value(&self) -> Value {
        serde_json::to_value(self).expect("config is serializable")
    }
}
