//! Majority voting over repeated judgments (vertical inference-time
//! scaling).

use crate::judge::JudgeError;
use crate::model::{label_sign, Judgment, PreferenceLabel};
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TieBreak {
    #[default]
    SeededRandom,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct VoteConfig {
    /// Number of judgments sampled per example.
    pub m: usize,
    pub tie_break: TieBreak,
}

impl Default for VoteConfig {
    fn default() -> Self {
        Self {
            m: 16,
            tie_break: TieBreak::SeededRandom,
        }
    }
}

// Uniform pick among candidates; counts are iterated in label order, so the
// outcome depends only on the vote multiset, never on ballot order.
fn pick_uniform(candidates: &[PreferenceLabel], rng: &mut impl Rng) -> PreferenceLabel {
    candidates[rng.random_range(0..candidates.len())]
}

fn argmax_labels(counts: &BTreeMap<PreferenceLabel, usize>) -> (usize, Vec<PreferenceLabel>) {
    let best = counts.values().copied().max().unwrap_or(0);
    let labels = counts
        .iter()
        .filter(|(_, c)| **c == best)
        .map(|(l, _)| *l)
        .collect();
    (best, labels)
}

/// Aggregates a ballot of judgments into one label.
///
/// Binary ballots take the label with the most votes. Multiclass ballots
/// first look for a strict majority on the exact value; failing that, the
/// majority sign wins and the most-voted value within that sign is
/// returned. All ties are broken uniformly with the seeded rng.
pub fn majority_vote(
    judgments: &[Judgment],
    cfg: &VoteConfig,
    rng: &mut impl Rng,
) -> Result<PreferenceLabel, JudgeError> {
    let _ = cfg.tie_break; // single strategy today
    let Some(first) = judgments.first() else {
        return Err(JudgeError::EmptyBallot);
    };
    let kind = first.label.kind();
    if judgments.iter().any(|j| j.label.kind() != kind) {
        return Err(JudgeError::KindMismatch);
    }
    let mut counts: BTreeMap<PreferenceLabel, usize> = BTreeMap::new();
    for j in judgments {
        *counts.entry(j.label).or_insert(0) += 1;
    }
    let total = judgments.len();
    let (best, leaders) = argmax_labels(&counts);

    match kind {
        crate::model::LabelKind::Binary => Ok(if leaders.len() == 1 {
            leaders[0]
        } else {
            pick_uniform(&leaders, rng)
        }),
        crate::model::LabelKind::Multiclass => {
            if best * 2 > total {
                // A strict majority on the exact value is unique.
                return Ok(leaders[0]);
            }
            let negative: usize = judgments
                .iter()
                .filter(|j| label_sign(&j.label) < 0)
                .count();
            let positive = total - negative;
            let winning_sign = if negative > positive {
                -1
            } else if positive > negative {
                1
            } else if rng.random_bool(0.5) {
                -1
            } else {
                1
            };
            let within: BTreeMap<PreferenceLabel, usize> = counts
                .into_iter()
                .filter(|(l, _)| label_sign(l) == winning_sign)
                .collect();
            let (_, leaders) = argmax_labels(&within);
            Ok(if leaders.len() == 1 {
                leaders[0]
            } else {
                pick_uniform(&leaders, rng)
            })
        }
    }
}

/// One aggregated vote: the final label plus ballot bookkeeping.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VoteOutcome {
    pub label: PreferenceLabel,
    /// Judgments that actually voted.
    pub ballot_size: usize,
    /// Samples dropped because the judge errored.
    pub dropped: usize,
}

/// Samples `m` judgments from `sample` and majority-votes the successes.
///
/// Failed samples (transport or parse) are dropped from the ballot rather
/// than counted as votes; if every sample fails the ballot is empty and
/// that error is returned.
pub fn vote_with<F>(
    cfg: &VoteConfig,
    rng: &mut impl Rng,
    mut sample: F,
) -> Result<VoteOutcome, JudgeError>
where
    F: FnMut(usize) -> Result<Judgment, JudgeError>,
{
    let mut ballot = Vec::with_capacity(cfg.m);
    let mut dropped = 0usize;
    for i in 0..cfg.m {
        match sample(i) {
            Ok(j) => ballot.push(j),
            Err(_) => dropped += 1,
        }
    }
    let label = majority_vote(&ballot, cfg, rng)?;
    Ok(VoteOutcome {
        label,
        ballot_size: ballot.len(),
        dropped,
    })
}
