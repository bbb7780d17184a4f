//! JSON experiment configuration.
//!
//! One document fixes the data source, the mechanism, the game and optional
//! sweep grids. Unknown keys are rejected and every field is validated before
//! any computation starts. All seeds derive from a single master seed.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::eval::{AttackKind, AttackerKind, GameConfig, MetaConfig, TargetObservations, ThresholdRule};
use crate::mechanism::MechanismSpec;
use crate::trace::{generate_synthetic_traces, ingest_traces_csv, TraceDataset};
use crate::{rng, Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SyntheticSpec {
    pub sites: usize,
    pub epochs: usize,
    pub traces: usize,
    /// Uniform rate for every cell.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rate: Option<f64>,
    /// Row-major per-cell rates.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rates: Option<Vec<f64>>,
}

impl SyntheticSpec {
    pub fn cell_rates(&self) -> Result<Vec<f64>> {
        let cells = self.sites * self.epochs;
        let rates = match (&self.rate, &self.rates) {
            (Some(r), None) => vec![*r; cells],
            (None, Some(rs)) => {
                if rs.len() != cells {
                    return Err(Error::config(
                        "data.synthetic.rates",
                        format!("expected {cells} values for a {}×{} grid, got {}", self.sites, self.epochs, rs.len()),
                    ));
                }
                rs.clone()
            }
            _ => return Err(Error::config("data.synthetic", "give exactly one of `rate` and `rates`")),
        };
        if let Some(bad) = rates.iter().find(|r| !(0.0..=1.0).contains(*r)) {
            let field = if self.rate.is_some() { "data.synthetic.rate" } else { "data.synthetic.rates" };
            return Err(Error::config(field, format!("rate {bad} outside [0, 1]")));
        }
        Ok(rates)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CsvSpec {
    pub path: PathBuf,
    pub sites: usize,
    pub epochs: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum DataSource {
    Synthetic(SyntheticSpec),
    Csv(CsvSpec),
}

impl DataSource {
    fn dims(&self) -> (usize, usize) {
        match self {
            DataSource::Synthetic(s) => (s.sites, s.epochs),
            DataSource::Csv(c) => (c.sites, c.epochs),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GameSection {
    pub attacker: AttackerKind,
    pub n_traces: usize,
    #[serde(default)]
    pub target_observations: TargetObservations,
    pub trials: usize,
    pub attacks: Vec<AttackKind>,
    pub shadow_count: usize,
    #[serde(default)]
    pub threshold_rule: ThresholdRule,
    #[serde(default)]
    pub meta: MetaConfig,
    #[serde(default = "default_reference_count")]
    pub reference_count: usize,
}

fn default_reference_count() -> usize {
    10
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    #[serde(default)]
    pub k_grid: Option<Vec<usize>>,
    #[serde(default)]
    pub m_grid: Option<Vec<usize>>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default)]
    pub dir: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub seed: Option<u64>,
    pub data: DataSource,
    pub mechanism: MechanismSpec,
    pub game: GameSection,
    #[serde(default)]
    pub sweep: SweepSection,
    #[serde(default)]
    pub output: OutputSection,
}

impl ExperimentConfig {
    pub fn from_json_str(s: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(s).map_err(|e| Error::config("<document>", e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Parse and validate a config file. A relative CSV path is resolved
    /// against the config file's directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut cfg = Self::from_json_str(&text)?;
        if let DataSource::Csv(c) = &mut cfg.data {
            if c.path.is_relative() {
                if let Some(dir) = path.parent() {
                    c.path = dir.join(&c.path);
                }
            }
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let (sites, epochs) = self.data.dims();
        if sites == 0 || epochs == 0 {
            return Err(Error::config("data", "grid needs at least one site and one epoch"));
        }
        if let DataSource::Synthetic(s) = &self.data {
            s.cell_rates()?;
            if s.traces < 2 {
                return Err(Error::config("data.synthetic.traces", "need at least two traces"));
            }
        }
        let cap = epochs * self.mechanism.clip_bound().min(sites);
        if let Some(&k) = self.sweep.k_grid.iter().flatten().find(|&&k| k > cap) {
            return Err(Error::config(
                "sweep.k_grid",
                format!("{k} observations exceed the {cap} cells a clipped trace can hold"),
            ));
        }
        if let TargetObservations::Count(k) = self.game.target_observations {
            if k > cap {
                return Err(Error::config(
                    "game.target_observations",
                    format!("{k} observations exceed the {cap} cells a clipped trace can hold"),
                ));
            }
        }
        for (field, grid) in [("sweep.k_grid", &self.sweep.k_grid), ("sweep.m_grid", &self.sweep.m_grid)] {
            if grid.as_ref().is_some_and(Vec::is_empty) {
                return Err(Error::config(field, "grid must not be empty"));
            }
        }
        if self.sweep.m_grid.as_ref().is_some_and(|g| g.iter().any(|&m| m < 2)) {
            return Err(Error::config("sweep.m_grid", "shadow counts must be at least 2"));
        }
        self.game_config(0).validate().map_err(|e| match e {
            Error::Config { field, reason } => Error::config(format!("game.{field}"), reason),
            other => other,
        })
    }

    /// Game parameters with seeds derived from `seed`.
    pub fn game_config(&self, seed: u64) -> GameConfig {
        let g = &self.game;
        GameConfig {
            attacker: g.attacker,
            mechanism: self.mechanism,
            n_traces: g.n_traces,
            target_observations: g.target_observations,
            trials: g.trials,
            attacks: g.attacks.clone(),
            shadow_count: g.shadow_count,
            target_seed: rng::derive_seed(seed, rng::domain::TARGET),
            dataset_seed: rng::derive_seed(seed, rng::domain::TRIAL),
            threshold_rule: g.threshold_rule,
            meta: g.meta.clone(),
            reference_count: g.reference_count,
        }
    }

    /// Synthetic population or ingested CSV.
    pub fn load_population(&self, seed: u64) -> Result<TraceDataset> {
        match &self.data {
            DataSource::Synthetic(s) => generate_synthetic_traces(
                s.sites,
                s.epochs,
                &s.cell_rates()?,
                s.traces,
                rng::derive_seed(seed, rng::domain::SYNTHETIC),
            ),
            DataSource::Csv(c) => ingest_traces_csv(&c.path, c.sites, c.epochs),
        }
    }
}
