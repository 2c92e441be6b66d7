//! Group-relative advantage estimation, pointwise and pairwise.
//!
//! The pointwise estimator normalizes rewards within a group of G samples:
//!
//! ```text
//! A_i = (r_i - mean(r)) / (std(r) + eps)        std Bessel-corrected
//! ```
//!
//! The pairwise estimator skips scalar rewards entirely. A skew-symmetric
//! preference-strength matrix D holds one entry d_ij per response pair,
//! obtained from a single judge evaluation, and the advantage is read off
//! the matrix:
//!
//! ```text
//! A_i = sum_j d_ij / ( sqrt( G/(2(G-1)) * sum_ij d_ij^2 ) + G*eps )
//! ```
//!
//! When d_ij = r_i - r_j the two estimators coincide exactly, because
//! sum_j d_ij = G*(r_i - mean) and sum_ij d_ij^2 = 2G(G-1)*var. The
//! [`equivalence_oracle`] checks that identity numerically.

use crate::model::{label_sign, Judgment, LabelKind, PreferenceLabel};
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::fmt::Display;
use thiserror::Error;

/// Tolerance for the structural matrix invariants.
const SKEW_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AdvError {
    #[error("group too small: G={g}, need at least 2")]
    GroupTooSmall { g: usize },
    #[error("broken skew symmetry at ({i},{j}): {residual}")]
    BrokenSkewSymmetry { i: usize, j: usize, residual: f64 },
    #[error("matrix shape mismatch: expected {expected} entries, got {got}")]
    ShapeMismatch { expected: usize, got: usize },
    #[error("judge returned a {got:?} label for pair ({i},{j}) in a {expected:?} matrix")]
    JudgeKindMismatch { i: usize, j: usize, expected: LabelKind, got: LabelKind },
}

/// Shared epsilon for both advantage denominators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AdvConfig {
    pub eps: f64,
}

impl Default for AdvConfig {
    fn default() -> Self {
        Self { eps: 1e-6 }
    }
}

impl AdvConfig {
    pub fn with_eps(eps: f64) -> Self {
        Self { eps }
    }
}

/// Per-group skew-symmetric matrix of preference strengths.
///
/// Entries are stored row-major; `entry(i, j)` is d_ij, positive when
/// response i beats response j. Groups never span prompts, so the matrix
/// is always G x G for one group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PreferenceMatrix {
    pub group_id: String,
    pub g: usize,
    /// Row-major entries, length g*g.
    pub entries: Vec<f64>,
}

impl PreferenceMatrix {
    /// All-zero matrix for a group of size `g`.
    pub fn zeros(group_id: impl Into<String>, g: usize) -> Self {
        Self {
            group_id: group_id.into(),
            g,
            entries: vec![0.0; g * g],
        }
    }

    /// Builds a matrix from reward differences d_ij = r_i - r_j.
    pub fn from_reward_differences(group_id: impl Into<String>, rewards: &[f64]) -> Self {
        let g = rewards.len();
        let mut m = Self::zeros(group_id, g);
        for i in 0..g {
            for j in 0..g {
                m.entries[i * g + j] = rewards[i] - rewards[j];
            }
        }
        m
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.g + j]
    }

    /// Sets d_ij and d_ji = -d_ij in one call.
    pub fn set_pair(&mut self, i: usize, j: usize, value: f64) {
        self.entries[i * self.g + j] = value;
        self.entries[j * self.g + i] = -value;
    }

    pub fn row_sum(&self, i: usize) -> f64 {
        self.entries[i * self.g..(i + 1) * self.g].iter().sum()
    }

    pub fn sum_of_squares(&self) -> f64 {
        self.entries.iter().map(|d| d * d).sum()
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            group_id: self.group_id.clone(),
            g: self.g,
            entries: self.entries.iter().map(|d| c * d).collect(),
        }
    }

    /// Verifies the skew-symmetry and zero-diagonal invariants.
    pub fn verify(&self) -> Result<(), AdvError> {
        if self.entries.len() != self.g * self.g {
            return Err(AdvError::ShapeMismatch {
                expected: self.g * self.g,
                got: self.entries.len(),
            });
        }
        for i in 0..self.g {
            for j in i..self.g {
                let residual = (self.entry(i, j) + self.entry(j, i)).abs();
                if residual > SKEW_TOL {
                    return Err(AdvError::BrokenSkewSymmetry { i, j, residual });
                }
            }
        }
        Ok(())
    }
}

/// Pointwise group-relative advantages.
///
/// A bitwise-constant reward vector has no learning signal and returns all
/// zeros rather than dividing zero by zero.
pub fn grpo_advantage(rewards: &[f64], cfg: &AdvConfig) -> Result<Vec<f64>, AdvError> {
    let g = rewards.len();
    if g < 2 {
        return Err(AdvError::GroupTooSmall { g });
    }
    let constant = rewards.windows(2).all(|w| w[0] == w[1]);
    if constant {
        return Ok(vec![0.0; g]);
    }
    let mean = rewards.iter().sum::<f64>() / g as f64;
    let var = rewards.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / (g as f64 - 1.0);
    let denom = var.sqrt() + cfg.eps;
    Ok(rewards.iter().map(|r| (r - mean) / denom).collect())
}

/// Pairwise advantages read directly off a preference-strength matrix.
pub fn pairwise_advantage(
    matrix: &PreferenceMatrix,
    cfg: &AdvConfig,
) -> Result<Vec<f64>, AdvError> {
    let g = matrix.g;
    if g < 2 {
        return Err(AdvError::GroupTooSmall { g });
    }
    matrix.verify()?;
    if matrix.entries.iter().all(|d| *d == 0.0) {
        return Ok(vec![0.0; g]);
    }
    let gf = g as f64;
    let denom = (gf / (2.0 * (gf - 1.0)) * matrix.sum_of_squares()).sqrt() + gf * cfg.eps;
    Ok((0..g).map(|i| matrix.row_sum(i) / denom).collect())
}

/// Both advantage routes computed from one reward vector, plus their
/// maximum absolute disagreement.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquivalenceReport {
    pub pointwise: Vec<f64>,
    pub pairwise: Vec<f64>,
    pub max_abs_diff: f64,
}

/// Sets d_ij = r_i - r_j and runs both estimators with the same epsilon.
///
/// The two formulas are algebraically identical under that substitution;
/// the report's `max_abs_diff` exposes the floating-point residual.
pub fn equivalence_oracle(rewards: &[f64], cfg: &AdvConfig) -> Result<EquivalenceReport, AdvError> {
    let pointwise = grpo_advantage(rewards, cfg)?;
    let matrix = PreferenceMatrix::from_reward_differences("oracle", rewards);
    let pairwise = pairwise_advantage(&matrix, cfg)?;
    let max_abs_diff = pointwise
        .iter()
        .zip(&pairwise)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    Ok(EquivalenceReport {
        pointwise,
        pairwise,
        max_abs_diff,
    })
}

/// Maps one judgment for the pair (i in the A role, j in the B role) to
/// the matrix entry d_ij.
///
/// Multiclass: d_ij = -s. Binary: d_ij = -sign(s)/|R|, the reasoning
/// length damping the implied gap on ambiguous comparisons. A zero-length
/// reasoning counts as length 1.
pub fn entry_from_judgment(judgment: &Judgment) -> f64 {
    match judgment.label {
        PreferenceLabel::Multiclass(s) => -(s as f64),
        PreferenceLabel::Binary(_) => {
            let sign = label_sign(&judgment.label) as f64;
            -sign / judgment.reasoning_len.max(1) as f64
        }
    }
}

/// Settings for matrix construction from a judge.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MatrixConfig {
    /// Additional attempts per pair after the first failure.
    pub max_retries: usize,
    /// When set, each pair's A/B role assignment is drawn from the rng
    /// instead of putting the lower index in the A role.
    pub randomize_roles: bool,
}

impl Default for MatrixConfig {
    fn default() -> Self {
        Self {
            max_retries: 2,
            randomize_roles: false,
        }
    }
}

/// A pair whose judge calls all failed; its entry was zeroed.
#[derive(Debug, Clone, Serialize)]
pub struct PairFailure {
    pub i: usize,
    pub j: usize,
    pub error: String,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct MatrixBuildStats {
    pub judged_pairs: usize,
    pub retried_calls: usize,
    pub failures: Vec<PairFailure>,
}

/// Builds the preference-strength matrix for one group.
///
/// Each unordered pair {i, j} is judged exactly once; `judge_pair(a, b)`
/// must evaluate response `a` in the A role against response `b` in the B
/// role. By default the lower index takes the A role. The companion entry
/// is filled by skew symmetry and the diagonal stays zero. A pair that
/// still fails after the configured retries contributes d_ij = 0 and is
/// recorded in the stats.
pub fn build_preference_matrix<F, E>(
    group_id: &str,
    group_size: usize,
    kind: LabelKind,
    cfg: &MatrixConfig,
    rng: &mut impl Rng,
    mut judge_pair: F,
) -> Result<(PreferenceMatrix, MatrixBuildStats), AdvError>
where
    F: FnMut(usize, usize) -> Result<Judgment, E>,
    E: Display,
{
    if group_size < 2 {
        return Err(AdvError::GroupTooSmall { g: group_size });
    }
    let mut matrix = PreferenceMatrix::zeros(group_id, group_size);
    let mut stats = MatrixBuildStats::default();
    for i in 0..group_size {
        for j in (i + 1)..group_size {
            let swap_roles = cfg.randomize_roles && rng.random_bool(0.5);
            let (a, b) = if swap_roles { (j, i) } else { (i, j) };
            let mut outcome = judge_pair(a, b);
            let mut attempts = 0;
            while outcome.is_err() && attempts < cfg.max_retries {
                attempts += 1;
                stats.retried_calls += 1;
                outcome = judge_pair(a, b);
            }
            stats.judged_pairs += 1;
            match outcome {
                Ok(judgment) => {
                    if judgment.label.kind() != kind {
                        return Err(AdvError::JudgeKindMismatch {
                            i,
                            j,
                            expected: kind,
                            got: judgment.label.kind(),
                        });
                    }
                    let d_ab = entry_from_judgment(&judgment);
                    // d for (a as A, b as B); flip when roles were swapped.
                    let d_ij = if swap_roles { -d_ab } else { d_ab };
                    matrix.set_pair(i, j, d_ij);
                }
                Err(e) => {
                    matrix.set_pair(i, j, 0.0);
                    stats.failures.push(PairFailure {
                        i,
                        j,
                        error: e.to_string(),
                    });
                }
            }
        }
    }
    Ok((matrix, stats))
}
