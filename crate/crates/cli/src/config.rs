//! Unified run configuration.
//!
//! A run is parameterized by one JSON config (all fields optional, with
//! defaults) plus a handful of CLI overrides. Resolution pushes the master
//! seed and the shared advantage epsilon into every sub-config and writes
//! the result to `config.resolved.json`, from which a rerun is
//! bit-identical.

use anyhow::{Context, Result};
use pairadv_core::advantage::{AdvConfig, MatrixConfig};
use pairadv_core::curation::CurationConfig;
use pairadv_core::judge::{RemoteJudgeConfig, SimJudgeConfig, VoteConfig};
use pairadv_core::model::{LabelKind, TokenConvention};
use pairadv_core::trainer::TrainConfig;
use serde::{Deserialize, Serialize};
use std::fs;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JudgeMode {
    #[default]
    Sim,
    Remote,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct JudgeSettings {
    pub mode: JudgeMode,
    pub kind: LabelKind,
    pub sim: SimJudgeConfig,
    /// True reward gap handed to the simulated judge when a dataset
    /// carries no environment signal.
    pub sim_gap: f64,
    pub remote: RemoteJudgeConfig,
}

impl Default for JudgeSettings {
    fn default() -> Self {
        Self {
            mode: JudgeMode::Sim,
            kind: LabelKind::Binary,
            sim: SimJudgeConfig::default(),
            sim_gap: 1.0,
            remote: RemoteJudgeConfig::default(),
        }
    }
}

/// Synthetic task dimensions for training runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct TaskConfig {
    pub vocab_size: usize,
    pub seq_len: usize,
}

impl Default for TaskConfig {
    fn default() -> Self {
        Self {
            vocab_size: 8,
            seq_len: 4,
        }
    }
}

/// Default input paths, overridable from the command line.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct IoPaths {
    pub examples: Option<PathBuf>,
    pub trajectories: Option<PathBuf>,
    pub dataset: Option<PathBuf>,
    pub groups: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub seed: u64,
    pub strict_io: bool,
    pub token_convention: TokenConvention,
    pub curation: CurationConfig,
    pub judge: JudgeSettings,
    pub vote: VoteConfig,
    pub adv: AdvConfig,
    pub matrix: MatrixConfig,
    pub train: TrainConfig,
    pub task: TaskConfig,
    pub paths: IoPaths,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            strict_io: true,
            token_convention: TokenConvention::default(),
            curation: CurationConfig::default(),
            judge: JudgeSettings::default(),
            vote: VoteConfig::default(),
            adv: AdvConfig::default(),
            matrix: MatrixConfig::default(),
            // RLHF-mode default: smaller groups than rule-based RL.
            train: TrainConfig {
                group_size: 4,
                steps: 500,
                ..TrainConfig::default()
            },
            task: TaskConfig::default(),
            paths: IoPaths::default(),
        }
    }
}

impl RunConfig {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        match path {
            Some(p) => {
                let text = fs::read_to_string(p)
                    .with_context(|| format!("reading config {}", p.display()))?;
                serde_json::from_str(&text)
                    .with_context(|| format!("parsing config {}", p.display()))
            }
            None => Ok(Self::default()),
        }
    }

    /// Propagates the master seed and shared epsilon into the sub-configs.
    pub fn resolve(mut self, seed_override: Option<u64>) -> Self {
        if let Some(seed) = seed_override {
            self.seed = seed;
        }
        self.train.seed = self.seed;
        self.train.adv = self.adv;
        self.judge.sim.seed = self.seed;
        self
    }

    /// Writes `config.resolved.json` under `out`.
    pub fn write_resolved(&self, out: &Path) -> Result<PathBuf> {
        fs::create_dir_all(out)?;
        let path = out.join("config.resolved.json");
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        fs::write(&path, text)?;
        Ok(path)
    }
}
