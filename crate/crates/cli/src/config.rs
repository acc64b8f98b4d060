//! Experiment configuration files (TOML).

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use acca_core::{InitialCondition, Stride};
use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    /// Open path relaxing to consensus.
    PathConsensus,
    /// Ring trajectory with time series and winding trace.
    RingConsensus,
    /// First-update crossing probability by Monte Carlo.
    CrossingProbMc,
    /// Ring from iid data; records when the winding stops changing.
    WindingFreeze,
    /// Linear sweep prediction plus wrapped cyclic replay.
    SweepEscape,
    /// Co-moving frame diagnostics on a twisted ring.
    CompensatorBound,
}

impl Scenario {
    pub fn name(self) -> &'static str {
        match self {
            Scenario::PathConsensus => "path-consensus",
            Scenario::RingConsensus => "ring-consensus",
            Scenario::CrossingProbMc => "crossing-prob-mc",
            Scenario::WindingFreeze => "winding-freeze",
            Scenario::SweepEscape => "sweep-escape",
            Scenario::CompensatorBound => "compensator-bound",
        }
    }

    pub fn is_ring(self) -> bool {
        !matches!(self, Scenario::PathConsensus)
    }
}

/// One experiment. Every field except `scenario` has a default.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub scenario: Scenario,
    #[serde(default = "defaults::n")]
    pub n: usize,
    #[serde(default = "defaults::horizon")]
    pub horizon: u64,
    #[serde(default = "defaults::replicas")]
    pub replicas: u64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "defaults::output_dir")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub sample_stride: Stride,
    /// Initial condition; each scenario has its own default.
    #[serde(default)]
    pub init: Option<InitialCondition>,
    /// Edges sampled per replica (crossing Monte Carlo).
    #[serde(default = "defaults::edges_per_replica")]
    pub edges_per_replica: usize,
    /// Linear sweeps evaluated (sweep escape).
    #[serde(default = "defaults::sweeps")]
    pub sweeps: u64,
    /// Winding of the twisted start (sweep escape, compensator bound).
    #[serde(default = "defaults::winding")]
    pub winding: i64,
    /// Named numeric tolerances; see [`Tolerances`].
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
}

mod defaults {
    use std::path::PathBuf;

    pub fn n() -> usize {
        64
    }
    pub fn horizon() -> u64 {
        1_000_000
    }
    pub fn replicas() -> u64 {
        1
    }
    pub fn output_dir() -> PathBuf {
        PathBuf::from("out")
    }
    pub fn edges_per_replica() -> usize {
        200
    }
    pub fn sweeps() -> u64 {
        200
    }
    pub fn winding() -> i64 {
        1
    }
}

/// Resolved tolerance table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Width of the antipodal band `|delta + pi| <= eps_ant`.
    pub eps_ant: f64,
    /// Standard errors allowed between the crossing estimate and 37/48.
    pub crossing_z: f64,
    /// Lift rebuild interval in steps.
    pub resync_interval: u64,
}

impl Tolerances {
    pub const KEYS: [&'static str; 3] = ["eps_ant", "crossing_z", "resync_interval"];
}

impl ExperimentConfig {
    pub fn new(scenario: Scenario) -> Self {
        let mut cfg: ExperimentConfig =
            toml::from_str(&format!("scenario = \"{}\"", scenario.name())).expect("defaults parse");
        if scenario == Scenario::CrossingProbMc {
            cfg.n = 4000;
            cfg.replicas = 1000;
        }
        cfg
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        Self::from_toml(&text).with_context(|| format!("parsing config {}", path.display()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        if self.replicas < 1 {
            bail!("replicas must be at least 1");
        }
        let min_n = if self.scenario.is_ring() { 3 } else { 2 };
        if self.n < min_n {
            bail!(
                "{} needs n >= {min_n}, got {}",
                self.scenario.name(),
                self.n
            );
        }
        if self.scenario == Scenario::CrossingProbMc
            && (self.edges_per_replica == 0 || self.edges_per_replica > self.n)
        {
            bail!(
                "edges_per_replica must lie in 1..={}, got {}",
                self.n,
                self.edges_per_replica
            );
        }
        if let Some(key) = self
            .tolerances
            .keys()
            .find(|k| !Tolerances::KEYS.contains(&k.as_str()))
        {
            bail!(
                "unknown tolerance `{key}`; known: {}",
                Tolerances::KEYS.join(", ")
            );
        }
        Ok(())
    }

    pub fn tolerances(&self) -> Tolerances {
        let get = |k: &str, d: f64| self.tolerances.get(k).copied().unwrap_or(d);
        Tolerances {
            eps_ant: get("eps_ant", 0.0),
            crossing_z: get("crossing_z", 3.0),
            resync_interval: get(
                "resync_interval",
                acca_core::lift::DEFAULT_RESYNC_INTERVAL as f64,
            ) as u64,
        }
    }

    /// The scenario's initial condition, explicit or default.
    pub fn initial_condition(&self) -> InitialCondition {
        if let Some(init) = &self.init {
            return init.clone();
        }
        match self.scenario {
            Scenario::SweepEscape => InitialCondition::PerfectTwist {
                winding: self.winding,
                noise: 0.0,
            },
            Scenario::CompensatorBound => InitialCondition::PerfectTwist {
                winding: self.winding,
                noise: 0.02,
            },
            _ => InitialCondition::IidUniform,
        }
    }
}
