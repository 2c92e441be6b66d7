//! Rule-based accuracy rewards.
//!
//! Rewards are based solely on accuracy: 1.0 for an exact label match,
//! 0.5 for a multiclass prediction with the correct sign, 0.0 otherwise.

use crate::model::{label_sign, LabelKind, PreferenceLabel};
use thiserror::Error;

/// The two labels passed to a reward function must share a kind.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("label kind mismatch: expected {expected:?}, got {got:?}")]
pub struct KindMismatch {
    pub expected: LabelKind,
    pub got: LabelKind,
}

fn require_kind(label: &PreferenceLabel, expected: LabelKind) -> Result<(), KindMismatch> {
    if label.kind() == expected {
        Ok(())
    } else {
        Err(KindMismatch {
            expected,
            got: label.kind(),
        })
    }
}

/// Binary accuracy reward: 1.0 on exact match, 0.0 otherwise.
pub fn binary_reward(
    predicted: &PreferenceLabel,
    gold: &PreferenceLabel,
) -> Result<f64, KindMismatch> {
    require_kind(predicted, LabelKind::Binary)?;
    require_kind(gold, LabelKind::Binary)?;
    Ok(if predicted == gold { 1.0 } else { 0.0 })
}

/// Multiclass accuracy reward: 1.0 on exact match, 0.5 when only the sign
/// matches, 0.0 otherwise.
pub fn multiclass_reward(
    predicted: &PreferenceLabel,
    gold: &PreferenceLabel,
) -> Result<f64, KindMismatch> {
    require_kind(predicted, LabelKind::Multiclass)?;
    require_kind(gold, LabelKind::Multiclass)?;
    Ok(if predicted == gold {
        1.0
    } else if label_sign(predicted) == label_sign(gold) {
        0.5
    } else {
        0.0
    })
}

/// Reward for a label pair of either kind; dispatches on the gold kind.
pub fn rule_reward(
    predicted: &PreferenceLabel,
    gold: &PreferenceLabel,
) -> Result<f64, KindMismatch> {
    match gold.kind() {
        LabelKind::Binary => binary_reward(predicted, gold),
        LabelKind::Multiclass => multiclass_reward(predicted, gold),
    }
}
