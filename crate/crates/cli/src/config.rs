//! Effective experiment configuration.
//!
//! Precedence: command-line flags > config file (`--config`, JSON) >
//! defaults. The merged result is echoed into every JSON report so a stored
//! report pins the run that produced it.

use serde::{Deserialize, Serialize};
use statedet::{Config64, OrderingPolicy, RandomSource, RestartPolicy};

/// Optional overrides loadable from a JSON config file. Any field may be
/// omitted.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub dim: Option<usize>,
    pub obs: Option<Vec<String>>,
    pub trials: Option<usize>,
    pub seed: Option<u64>,
    pub tol: Option<f64>,
    pub max_cycles: Option<usize>,
    pub stall_window: Option<usize>,
    pub stall_factor: Option<f64>,
    pub max_restarts: Option<usize>,
    pub restart: Option<String>,
    pub order: Option<String>,
    pub format: Option<String>,
}

impl FileConfig {
    pub fn load(path: &str) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }
}

/// Fully resolved run parameters, serialized into JSON reports.
#[derive(Debug, Clone, Serialize)]
pub struct EffectiveConfig {
    pub subcommand: String,
    pub dim: usize,
    pub observables: Vec<String>,
    pub trials: usize,
    pub seed: u64,
    pub residual_tol: f64,
    pub max_cycles: usize,
    pub stall_window: usize,
    pub stall_factor: f64,
    pub max_restarts: usize,
    pub restart: String,
    pub order: String,
}

impl EffectiveConfig {
    /// Reconstruction config on the given random stream.
    pub fn reconstruction(&self, stream: u64) -> Config64 {
        let mut config = Config64::new(RandomSource::new(self.seed, stream));
        config.residual_tol = self.residual_tol;
        config.max_cycles = self.max_cycles;
        config.stall_window = self.stall_window;
        config.stall_factor = self.stall_factor;
        config.max_restarts = self.max_restarts;
        config.restart_policy = match self.restart.as_str() {
            "random" => RestartPolicy::Random,
            _ => RestartPolicy::Orthogonal,
        };
        config.ordering_policy = match self.order.as_str() {
            "random" => OrderingPolicy::RandomPerCycle,
            _ => OrderingPolicy::FixedCyclic,
        };
        config
    }
}

pub fn parse_restart(s: &str) -> Result<String, String> {
    match s {
        "random" | "orthogonal" => Ok(s.to_string()),
        _ => Err(format!("unknown restart policy `{s}` (random|orthogonal)")),
    }
}

pub fn parse_order(s: &str) -> Result<String, String> {
    match s {
        "cyclic" | "random" => Ok(s.to_string()),
        _ => Err(format!("unknown ordering `{s}` (cyclic|random)")),
    }
}

pub fn parse_format(s: &str) -> Result<String, String> {
    match s {
        "csv" | "json" => Ok(s.to_string()),
        _ => Err(format!("unknown format `{s}` (csv|json)")),
    }
}
