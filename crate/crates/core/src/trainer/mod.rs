//! Tabular softmax sequence policies with analytic gradients, the losses
//! built on them, and the GRPO training loops.

mod check;
mod grpo;
mod loss;
mod policy;
mod task;

pub use check::{
    equivalence_sweep, fd_gradient, gradient_oracle, gradient_relative_error,
    EquivalenceOracleReport, GradientOracleReport,
};
pub use grpo::{
    grpo_step, train_rlhf, AdvMode, PairwiseJudgeConfig, RolloutAudit, RunResult, StepMetrics,
    TrainConfig,
};
pub use loss::{
    clipped_surrogate, kl_exact, kl_grad, sft_grad, sft_loss, surrogate_grad, AdvSample, SftLoss,
    SurrogateConfig, SurrogateValue,
};
pub use policy::SeqPolicy;
pub use task::{
    decode_label, encode_warmup, label_token, JudgeAccuracyTask, SequenceReward, SyntheticTask,
};

use crate::advantage::AdvError;
use crate::judge::JudgeError;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TrainError {
    #[error("bad sequence: {0}")]
    BadSequence(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("invalid train config: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Advantage(#[from] AdvError),
    #[error(transparent)]
    Judge(#[from] JudgeError),
}
