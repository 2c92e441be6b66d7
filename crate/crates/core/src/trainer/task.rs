//! Desk-scale reward environments and the token encodings that connect
//! sequences to preference labels.

use crate::model::{BinaryChoice, LabelKind, PreferenceLabel};
use crate::rewards::rule_reward;
use crate::seeding::name_hash;
use crate::trainer::TrainError;
use rand::Rng;
use serde::{Deserialize, Serialize};

/// A reward oracle over fixed-length token sequences.
///
/// `group` indexes the rollout group within a batch, letting multi-prompt
/// tasks rotate through their prompts.
pub trait SequenceReward {
    fn vocab_size(&self) -> usize;
    fn seq_len(&self) -> usize;
    fn true_reward(&self, group: usize, seq: &[usize]) -> f64;
}

/// Weighted token-match task: a hidden target sequence and per-position
/// weights, with `true_reward(y)` the normalized weight of matched
/// positions. The target itself scores exactly 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticTask {
    vocab_size: usize,
    target: Vec<usize>,
    /// Normalized to sum to 1.
    weights: Vec<f64>,
}

impl SyntheticTask {
    pub fn new(
        vocab_size: usize,
        target: Vec<usize>,
        weights: Vec<f64>,
    ) -> Result<Self, TrainError> {
        if target.is_empty() || target.len() != weights.len() {
            return Err(TrainError::InvalidConfig(
                "target and weights must be non-empty and equal length".into(),
            ));
        }
        if target.iter().any(|t| *t >= vocab_size) {
            return Err(TrainError::InvalidConfig(
                "target token outside vocab".into(),
            ));
        }
        if weights.iter().any(|w| *w < 0.0) {
            return Err(TrainError::InvalidConfig("negative weight".into()));
        }
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return Err(TrainError::InvalidConfig("weights sum to zero".into()));
        }
        Ok(Self {
            vocab_size,
            target,
            weights: weights.into_iter().map(|w| w / total).collect(),
        })
    }

    pub fn random(vocab_size: usize, seq_len: usize, rng: &mut impl Rng) -> Self {
        let target = (0..seq_len)
            .map(|_| rng.random_range(0..vocab_size))
            .collect();
        let weights = (0..seq_len).map(|_| 0.5 + rng.random::<f64>()).collect();
        Self::new(vocab_size, target, weights).expect("random task is valid")
    }

    pub fn target(&self) -> &[usize] {
        &self.target
    }
}

impl SequenceReward for SyntheticTask {
    fn vocab_size(&self) -> usize {
        self.vocab_size
    }

    fn seq_len(&self) -> usize {
        self.target.len()
    }

    fn true_reward(&self, _group: usize, seq: &[usize]) -> f64 {
        self.target
            .iter()
            .zip(seq)
            .zip(&self.weights)
            .map(|((t, y), w)| if t == y { *w } else { 0.0 })
            .sum()
    }
}

const MULTICLASS_VALUES: [i8; 6] = [-3, -2, -1, 1, 2, 3];

/// Token id carrying a preference label in an encoded sequence.
pub fn label_token(label: &PreferenceLabel) -> usize {
    match label {
        PreferenceLabel::Binary(BinaryChoice::A) => 0,
        PreferenceLabel::Binary(BinaryChoice::B) => 1,
        PreferenceLabel::Multiclass(v) => MULTICLASS_VALUES
            .iter()
            .position(|m| m == v)
            .expect("valid multiclass value"),
    }
}

/// Label carried by a token (the inverse of [`label_token`], modulo the
/// label-slot count).
pub fn decode_label(token: usize, kind: LabelKind) -> PreferenceLabel {
    match kind {
        LabelKind::Binary => PreferenceLabel::Binary(if token.is_multiple_of(2) {
            BinaryChoice::A
        } else {
            BinaryChoice::B
        }),
        LabelKind::Multiclass => PreferenceLabel::Multiclass(MULTICLASS_VALUES[token % 6]),
    }
}

/// Rule-based reward environment for training a toy judge policy.
///
/// A rollout's final token encodes the predicted label; the reward is the
/// accuracy rule applied against the gold label of the group's example.
#[derive(Debug, Clone, PartialEq)]
pub struct JudgeAccuracyTask {
    pub vocab_size: usize,
    pub seq_len: usize,
    pub kind: LabelKind,
    pub golds: Vec<PreferenceLabel>,
}

impl JudgeAccuracyTask {
    pub fn new(
        vocab_size: usize,
        seq_len: usize,
        kind: LabelKind,
        golds: Vec<PreferenceLabel>,
    ) -> Result<Self, TrainError> {
        let slots = match kind {
            LabelKind::Binary => 2,
            LabelKind::Multiclass => 6,
        };
        if vocab_size < slots {
            return Err(TrainError::InvalidConfig(format!(
                "vocab {vocab_size} too small for {kind:?} labels"
            )));
        }
        if golds.is_empty() || golds.iter().any(|g| g.kind() != kind) {
            return Err(TrainError::InvalidConfig(
                "golds empty or of mixed kind".into(),
            ));
        }
        Ok(Self {
            vocab_size,
            seq_len,
            kind,
            golds,
        })
    }
}

impl SequenceReward for JudgeAccuracyTask {
    fn vocab_size(&self) -> usize {
        self.vocab_size
    }

    fn seq_len(&self) -> usize {
        self.seq_len
    }

    fn true_reward(&self, group: usize, seq: &[usize]) -> f64 {
        let gold = &self.golds[group % self.golds.len()];
        let predicted = decode_label(*seq.last().expect("non-empty sequence"), self.kind);
        rule_reward(&predicted, gold).expect("kinds match by construction")
    }
}

/// Encodes a curated warm-up pair as reasoning tokens followed by the
/// label token, for feeding the SFT loss.
///
/// Reasoning words are hashed into the vocabulary; at most `max_len - 1`
/// of them are kept so the label token always fits.
pub fn encode_warmup(
    reasoning: &str,
    label: &PreferenceLabel,
    vocab_size: usize,
    max_len: usize,
) -> Result<Vec<usize>, TrainError> {
    let slots = match label.kind() {
        LabelKind::Binary => 2,
        LabelKind::Multiclass => 6,
    };
    if vocab_size < slots {
        return Err(TrainError::InvalidConfig(format!(
            "vocab {vocab_size} cannot encode {:?} labels",
            label.kind()
        )));
    }
    if max_len == 0 {
        return Err(TrainError::InvalidConfig("max_len must be >= 1".into()));
    }
    let mut tokens: Vec<usize> = reasoning
        .split_whitespace()
        .take(max_len - 1)
        .map(|w| (name_hash(w) % vocab_size as u64) as usize)
        .collect();
    tokens.push(label_token(label));
    Ok(tokens)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seeding::substream;

    #[test]
    fn target_scores_one_and_reward_is_bounded() {
        let mut rng = substream(2, "task");
        for _ in 0..20 {
            let task = SyntheticTask::random(6, 5, &mut rng);
            let target = task.target().to_vec();
            assert!((task.true_reward(0, &target) - 1.0).abs() < 1e-12);
            for _ in 0..20 {
                let y: Vec<usize> = (0..5).map(|_| rng.random_range(0..6)).collect();
                let r = task.true_reward(0, &y);
                assert!((0.0..=1.0 + 1e-12).contains(&r));
            }
        }
    }

    #[test]
    fn label_token_round_trips() {
        for label in PreferenceLabel::all_valid() {
            let tok = label_token(&label);
            assert_eq!(decode_label(tok, label.kind()), label);
        }
    }

    #[test]
    fn judge_task_rewards_match_the_rule_tables() {
        let golds = vec![PreferenceLabel::Multiclass(2)];
        let task = JudgeAccuracyTask::new(8, 3, LabelKind::Multiclass, golds).unwrap();
        // Last token 4 decodes to +2: exact match.
        assert_eq!(task.true_reward(0, &[0, 0, 4]), 1.0);
        // Last token 3 decodes to +1: sign match.
        assert_eq!(task.true_reward(0, &[0, 0, 3]), 0.5);
        // Last token 0 decodes to -3: wrong sign.
        assert_eq!(task.true_reward(0, &[0, 0, 0]), 0.0);
    }

    #[test]
    fn warmup_encoding_ends_with_the_label_token() {
        let label = PreferenceLabel::Binary(BinaryChoice::B);
        let tokens = encode_warmup("compare the two answers", &label, 8, 10).unwrap();
        assert_eq!(tokens.len(), 5);
        assert_eq!(*tokens.last().unwrap(), 1);
        assert!(tokens.iter().all(|t| *t < 8));

        let clipped = encode_warmup("a b c d e f g h", &label, 8, 4).unwrap();
        assert_eq!(clipped.len(), 4);
        assert_eq!(*clipped.last().unwrap(), 1);
    }
}
