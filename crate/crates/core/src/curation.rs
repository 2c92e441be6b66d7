//! Warm-up dataset curation from pre-generated reasoning trajectories.
//!
//! For each preference example, keep only trajectories whose predicted
//! label matches the gold label, then select one by reasoning length
//! (longest by default, shortest as the ablation variant). Examples where
//! every trajectory is wrong are discarded.

use crate::model::{PreferenceExample, TrajectoryRecord};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CurationError {
    #[error("trajectory for example {got:?} passed to example {expected:?}")]
    IdMismatch { expected: String, got: String },
}

/// Which correct trajectory to keep per example.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SelectionStrategy {
    #[default]
    LongestCorrect,
    ShortestCorrect,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CurationConfig {
    pub strategy: SelectionStrategy,
    /// Expected trajectory count per example; fewer is warned, not fatal.
    pub min_trajectories: usize,
}

impl Default for CurationConfig {
    fn default() -> Self {
        Self {
            strategy: SelectionStrategy::LongestCorrect,
            min_trajectories: 10,
        }
    }
}

/// A curated warm-up pair: the example plus its chosen correct trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct WarmupExample {
    pub example: PreferenceExample,
    pub chosen: TrajectoryRecord,
}

/// Outcome of per-example selection.
#[derive(Debug, Clone, PartialEq)]
pub enum Selection {
    Kept(WarmupExample),
    /// Every trajectory disagreed with the gold label.
    Discarded,
}

/// Picks the warm-up trajectory for one example.
///
/// Correct trajectories are those predicting the gold label exactly. Among
/// them the longest (or shortest) reasoning wins; length ties keep the
/// first record in input order.
pub fn select_warmup_trajectory(
    ex: &PreferenceExample,
    trajectories: &[TrajectoryRecord],
    cfg: &CurationConfig,
) -> Result<Selection, CurationError> {
    for t in trajectories {
        if t.example_id != ex.id {
            return Err(CurationError::IdMismatch {
                expected: ex.id.clone(),
                got: t.example_id.clone(),
            });
        }
    }
    let mut best: Option<&TrajectoryRecord> = None;
    for t in trajectories {
        if t.predicted_label != ex.gold_label {
            continue;
        }
        let better = match (cfg.strategy, best) {
            (_, None) => true,
            (SelectionStrategy::LongestCorrect, Some(b)) => t.reasoning_len > b.reasoning_len,
            (SelectionStrategy::ShortestCorrect, Some(b)) => t.reasoning_len < b.reasoning_len,
        };
        if better {
            best = Some(t);
        }
    }
    Ok(match best {
        Some(t) => Selection::Kept(WarmupExample {
            example: ex.clone(),
            chosen: t.clone(),
        }),
        None => Selection::Discarded,
    })
}

/// Counters for a curation run.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct CurationReport {
    pub kept: usize,
    pub discarded: usize,
    pub discard_rate: f64,
    /// Example ids with fewer than `min_trajectories` records.
    pub under_min: Vec<String>,
}

/// Curates a whole dataset, preserving input example order.
pub fn build_warmup_dataset(
    examples: &[PreferenceExample],
    trajectories: &[TrajectoryRecord],
    cfg: &CurationConfig,
) -> Result<(Vec<WarmupExample>, CurationReport), CurationError> {
    let mut by_example: HashMap<&str, Vec<&TrajectoryRecord>> = HashMap::new();
    for t in trajectories {
        by_example.entry(t.example_id.as_str()).or_default().push(t);
    }
    let mut kept = Vec::new();
    let mut report = CurationReport::default();
    for ex in examples {
        let records: Vec<TrajectoryRecord> = by_example
            .get(ex.id.as_str())
            .map(|v| v.iter().map(|t| (*t).clone()).collect())
            .unwrap_or_default();
        if records.len() < cfg.min_trajectories {
            report.under_min.push(ex.id.clone());
        }
        match select_warmup_trajectory(ex, &records, cfg)? {
            Selection::Kept(w) => {
                report.kept += 1;
                kept.push(w);
            }
            Selection::Discarded => report.discarded += 1,
        }
    }
    let total = report.kept + report.discarded;
    report.discard_rate = if total == 0 {
        0.0
    } else {
        report.discarded as f64 / total as f64
    };
    Ok((kept, report))
}
