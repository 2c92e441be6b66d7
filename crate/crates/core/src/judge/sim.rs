//! Simulated generative judge.
//!
//! Stands in for a real judge during desk-scale experiments. Its accuracy
//! rises with the true reward gap between the two responses,
//!
//! ```text
//! p(gap) = 0.5 + (p_max - 0.5) * (1 - exp(-kappa * gap))
//! ```
//!
//! while its reasoning length shrinks with the gap, mirroring the
//! observation that longer reasoning marks more ambiguous comparisons:
//!
//! ```text
//! len(gap) = round(len_min + (len_max - len_min) * exp(-lambda * gap))
//! ```

use crate::judge::JudgeError;
use crate::model::{
    label_sign, BinaryChoice, Judgment, LabelKind, PreferenceExample, PreferenceLabel,
};
use rand::Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SimJudgeConfig {
    /// Asymptotic accuracy as the gap grows, in [0.5, 1]; 0.5 is a
    /// pure-noise judge.
    pub p_max: f64,
    /// Gap sensitivity of the accuracy curve; > 0.
    pub kappa: f64,
    pub len_min: usize,
    pub len_max: usize,
    /// Length decay rate; > 0.
    pub lambda: f64,
    pub seed: u64,
    /// Gap cutoffs separating multiclass magnitudes 1/2 and 2/3.
    pub strength_thresholds: (f64, f64),
}

impl Default for SimJudgeConfig {
    fn default() -> Self {
        Self {
            p_max: 0.9,
            kappa: 4.0,
            len_min: 100,
            len_max: 1000,
            lambda: 1.0,
            seed: 0,
            strength_thresholds: (1.0 / 3.0, 2.0 / 3.0),
        }
    }
}

impl SimJudgeConfig {
    pub fn validate(&self) -> Result<(), JudgeError> {
        if !(self.p_max >= 0.5 && self.p_max <= 1.0) {
            return Err(JudgeError::InvalidConfig(format!(
                "p_max {} outside [0.5, 1]",
                self.p_max
            )));
        }
        if self.kappa <= 0.0 {
            return Err(JudgeError::InvalidConfig("kappa must be > 0".into()));
        }
        if self.lambda <= 0.0 {
            return Err(JudgeError::InvalidConfig("lambda must be > 0".into()));
        }
        if self.len_min > self.len_max {
            return Err(JudgeError::InvalidConfig("len_min > len_max".into()));
        }
        if self.strength_thresholds.0 > self.strength_thresholds.1 {
            return Err(JudgeError::InvalidConfig(
                "strength thresholds out of order".into(),
            ));
        }
        Ok(())
    }

    /// Probability of a direction-correct judgment at this gap.
    pub fn accuracy(&self, gap: f64) -> f64 {
        0.5 + (self.p_max - 0.5) * (1.0 - (-self.kappa * gap).exp())
    }

    /// Synthetic reasoning length at this gap.
    pub fn reasoning_len(&self, gap: f64) -> usize {
        let span = (self.len_max - self.len_min) as f64;
        (self.len_min as f64 + span * (-self.lambda * gap).exp()).round() as usize
    }

    fn magnitude(&self, gap: f64) -> i8 {
        if gap >= self.strength_thresholds.1 {
            3
        } else if gap >= self.strength_thresholds.0 {
            2
        } else {
            1
        }
    }
}

// Filler words cycled to hit an exact whitespace token count.
const FILLER: [&str; 6] = [
    "weighing",
    "both",
    "responses",
    "against",
    "the",
    "criteria",
];

fn filler_text(tokens: usize) -> String {
    let mut out = String::new();
    for i in 0..tokens {
        if i > 0 {
            out.push(' ');
        }
        out.push_str(FILLER[i % FILLER.len()]);
    }
    out
}

/// Draws one simulated judgment for `ex`.
///
/// `true_gap` is the environment's reward difference between the preferred
/// and the other response, and must be non-negative. The emitted label
/// agrees in direction with the gold label with probability
/// `accuracy(true_gap)`; its multiclass magnitude and reasoning length are
/// deterministic functions of the gap.
pub fn sim_judge(
    ex: &PreferenceExample,
    true_gap: f64,
    cfg: &SimJudgeConfig,
    rng: &mut impl Rng,
) -> Result<Judgment, JudgeError> {
    if true_gap < 0.0 || true_gap.is_nan() {
        return Err(JudgeError::NegativeGap { gap: true_gap });
    }
    cfg.validate()?;
    let correct = rng.random_bool(cfg.accuracy(true_gap));
    let gold_sign = label_sign(&ex.gold_label);
    let sign = if correct { gold_sign } else { -gold_sign };
    let label = match ex.gold_label.kind() {
        LabelKind::Binary => PreferenceLabel::Binary(if sign < 0 {
            BinaryChoice::A
        } else {
            BinaryChoice::B
        }),
        LabelKind::Multiclass => PreferenceLabel::Multiclass(sign as i8 * cfg.magnitude(true_gap)),
    };
    let reasoning_len = cfg.reasoning_len(true_gap);
    Ok(Judgment {
        reasoning: filler_text(reasoning_len),
        reasoning_len,
        label,
    })
}
