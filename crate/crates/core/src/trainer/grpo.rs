//! GRPO rollout-and-update loop over tabular policies, with pointwise and
//! pairwise advantage modes.
//!
//! Pointwise mode scores each rollout with the task's reward oracle and
//! normalizes within the group. Pairwise mode never touches scalar
//! rewards: a simulated judge compares every response pair in the group,
//! the comparisons fill a preference-strength matrix, and advantages are
//! read off the matrix.

use crate::advantage::{
    build_preference_matrix, grpo_advantage, pairwise_advantage, AdvConfig, MatrixConfig,
    PreferenceMatrix,
};
use crate::judge::{sim_judge, SimJudgeConfig};
use crate::model::{BinaryChoice, LabelKind, PreferenceExample, PreferenceLabel};
use crate::seeding::substream;
use crate::trainer::loss::{
    clipped_surrogate, kl_exact, surrogate_grad, AdvSample, SurrogateConfig,
};
use crate::trainer::policy::SeqPolicy;
use crate::trainer::task::SequenceReward;
use crate::trainer::TrainError;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// How advantages are estimated from a rollout group.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AdvMode {
    /// Scalar rewards normalized within the group.
    PointwiseRule,
    /// Judge-built preference-strength matrix, no scalar rewards.
    PairwiseMatrix,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub group_size: usize,
    pub clip_eps: f64,
    pub kl_beta: f64,
    pub adv: AdvConfig,
    pub lr: f64,
    pub steps: usize,
    pub seed: u64,
    /// Groups per step.
    pub rollout_batch: usize,
    pub rollout_temperature: f64,
    /// Keep per-step matrices and group rewards for audit.
    pub record_rollouts: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            group_size: 8,
            clip_eps: 0.2,
            kl_beta: 1e-4,
            adv: AdvConfig::default(),
            lr: 0.1,
            steps: 200,
            seed: 0,
            rollout_batch: 4,
            rollout_temperature: 1.0,
            record_rollouts: false,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<(), TrainError> {
        if self.group_size < 2 {
            return Err(TrainError::InvalidConfig("group_size must be >= 2".into()));
        }
        if !(self.clip_eps > 0.0 && self.clip_eps < 1.0) {
            return Err(TrainError::InvalidConfig(
                "clip_eps must be in (0,1)".into(),
            ));
        }
        if self.kl_beta < 0.0 {
            return Err(TrainError::InvalidConfig("kl_beta must be >= 0".into()));
        }
        if self.lr <= 0.0 {
            return Err(TrainError::InvalidConfig("lr must be > 0".into()));
        }
        if self.rollout_batch == 0 {
            return Err(TrainError::InvalidConfig(
                "rollout_batch must be >= 1".into(),
            ));
        }
        if self.rollout_temperature <= 0.0 {
            return Err(TrainError::InvalidConfig(
                "rollout_temperature must be > 0".into(),
            ));
        }
        Ok(())
    }
}

/// Simulated judge settings for pairwise mode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairwiseJudgeConfig {
    pub sim: SimJudgeConfig,
    pub kind: LabelKind,
    pub matrix: MatrixConfig,
}

impl Default for PairwiseJudgeConfig {
    fn default() -> Self {
        Self {
            sim: SimJudgeConfig::default(),
            kind: LabelKind::Binary,
            matrix: MatrixConfig::default(),
        }
    }
}

/// Matrices and group rewards kept for one step when auditing.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RolloutAudit {
    pub matrices: Vec<PreferenceMatrix>,
    pub group_rewards: Vec<Vec<f64>>,
    pub group_advantages: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepMetrics {
    pub step: usize,
    pub mean_true_reward: f64,
    /// Reward feeding the advantage path; equals the true-reward mean in
    /// both modes at desk scale.
    pub mean_reward: f64,
    pub mean_abs_advantage: f64,
    pub clip_fraction: f64,
    pub kl: f64,
    pub judge_errors: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub audit: Option<RolloutAudit>,
}

// Renders a rollout pair as a throwaway preference example so the shared
// simulated-judge path can score it; gold direction comes from the task's
// true rewards.
fn pair_example(
    group: usize,
    seq_a: &[usize],
    seq_b: &[usize],
    reward_a: f64,
    reward_b: f64,
    kind: LabelKind,
) -> PreferenceExample {
    let render = |seq: &[usize]| {
        seq.iter()
            .map(|t| t.to_string())
            .collect::<Vec<_>>()
            .join(" ")
    };
    let a_preferred = reward_a >= reward_b;
    let gold_label = match kind {
        LabelKind::Binary => PreferenceLabel::Binary(if a_preferred {
            BinaryChoice::A
        } else {
            BinaryChoice::B
        }),
        LabelKind::Multiclass => PreferenceLabel::Multiclass(if a_preferred { -1 } else { 1 }),
    };
    PreferenceExample {
        id: format!("rollout-{group}"),
        context: format!("group {group}"),
        response_a: render(seq_a),
        response_b: render(seq_b),
        gold_label,
    }
}

/// One GRPO iteration: sample G rollouts per group, estimate advantages,
/// take one analytic gradient-ascent step on the clipped objective.
pub fn grpo_step(
    policy: &SeqPolicy,
    reference: &SeqPolicy,
    task: &dyn SequenceReward,
    judge: Option<&PairwiseJudgeConfig>,
    cfg: &TrainConfig,
    adv_mode: AdvMode,
    rng: &mut ChaCha8Rng,
) -> Result<(SeqPolicy, StepMetrics), TrainError> {
    cfg.validate()?;
    if adv_mode == AdvMode::PairwiseMatrix && judge.is_none() {
        return Err(TrainError::InvalidConfig(
            "pairwise mode needs a judge config".into(),
        ));
    }
    let g = cfg.group_size;
    let mut samples: Vec<AdvSample> = Vec::with_capacity(cfg.rollout_batch * g);
    let mut reward_sum = 0.0;
    let mut judge_errors = 0usize;
    let mut audit = cfg.record_rollouts.then(|| RolloutAudit {
        matrices: Vec::new(),
        group_rewards: Vec::new(),
        group_advantages: Vec::new(),
    });

    for group in 0..cfg.rollout_batch {
        let sequences: Vec<Vec<usize>> = (0..g)
            .map(|_| policy.sample(cfg.rollout_temperature, rng))
            .collect();
        let rewards: Vec<f64> = sequences
            .iter()
            .map(|s| task.true_reward(group, s))
            .collect();
        reward_sum += rewards.iter().sum::<f64>();

        let advantages = match adv_mode {
            AdvMode::PointwiseRule => grpo_advantage(&rewards, &cfg.adv)?,
            AdvMode::PairwiseMatrix => {
                let jc = judge.expect("checked above");
                let mut role_rng = ChaCha8Rng::seed_from_u64(rng.random::<u64>());
                let mut judge_rng = ChaCha8Rng::seed_from_u64(rng.random::<u64>());
                let (matrix, stats) = build_preference_matrix(
                    &format!("group-{group}"),
                    g,
                    jc.kind,
                    &jc.matrix,
                    &mut role_rng,
                    |a, b| {
                        let ex = pair_example(
                            group,
                            &sequences[a],
                            &sequences[b],
                            rewards[a],
                            rewards[b],
                            jc.kind,
                        );
                        let gap = (rewards[a] - rewards[b]).abs();
                        sim_judge(&ex, gap, &jc.sim, &mut judge_rng)
                    },
                )?;
                judge_errors += stats.failures.len();
                let advantages = pairwise_advantage(&matrix, &cfg.adv)?;
                if let Some(audit) = audit.as_mut() {
                    audit.matrices.push(matrix);
                }
                advantages
            }
        };
        if let Some(audit) = audit.as_mut() {
            audit.group_rewards.push(rewards.clone());
            audit.group_advantages.push(advantages.clone());
        }
        for (sequence, advantage) in sequences.into_iter().zip(&advantages) {
            samples.push(AdvSample {
                sequence,
                advantage: *advantage,
            });
        }
    }

    let surrogate_cfg = SurrogateConfig {
        clip_eps: cfg.clip_eps,
        kl_beta: cfg.kl_beta,
    };
    let value = clipped_surrogate(policy, policy, reference, &samples, &surrogate_cfg)?;
    let grad = surrogate_grad(policy, policy, reference, &samples, &surrogate_cfg)?;
    let updated = policy.ascended(&grad, cfg.lr)?;

    let n = samples.len() as f64;
    let metrics = StepMetrics {
        step: 0,
        mean_true_reward: reward_sum / n,
        mean_reward: reward_sum / n,
        mean_abs_advantage: samples.iter().map(|s| s.advantage.abs()).sum::<f64>() / n,
        clip_fraction: value.clip_fraction,
        kl: kl_exact(&updated, reference)?,
        judge_errors,
        audit,
    };
    Ok((updated, metrics))
}

/// Full training run plus its metric series.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunResult {
    pub metrics: Vec<StepMetrics>,
    pub final_policy: SeqPolicy,
}

impl RunResult {
    pub fn initial_mean_true_reward(&self) -> f64 {
        self.metrics.first().map_or(0.0, |m| m.mean_true_reward)
    }

    pub fn final_mean_true_reward(&self) -> f64 {
        self.metrics.last().map_or(0.0, |m| m.mean_true_reward)
    }
}

/// Runs `cfg.steps` GRPO iterations from a uniform initial policy, which
/// also serves as the fixed KL reference.
pub fn train_rlhf(
    task: &dyn SequenceReward,
    judge: Option<&PairwiseJudgeConfig>,
    cfg: &TrainConfig,
    adv_mode: AdvMode,
) -> Result<RunResult, TrainError> {
    cfg.validate()?;
    let reference = SeqPolicy::uniform(task.vocab_size(), task.seq_len());
    let mut policy = reference.clone();
    let mut rng = substream(cfg.seed, "train");
    let mut metrics = Vec::with_capacity(cfg.steps);
    for step in 0..cfg.steps {
        let (updated, mut m) =
            grpo_step(&policy, &reference, task, judge, cfg, adv_mode, &mut rng)?;
        m.step = step;
        metrics.push(m);
        policy = updated;
    }
    Ok(RunResult {
        metrics,
        final_policy: policy,
    })
}
