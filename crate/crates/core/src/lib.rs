//! Preference-based policy optimization at desk scale.
//!
//! The crate covers the full pipeline around a generative pairwise judge:
//! rule-based accuracy rewards, warm-up data curation from reasoning
//! trajectories, judge simulation and remote judging with majority voting,
//! the skew-symmetric preference-strength matrix with its direct pairwise
//! advantage estimator, and GRPO training loops over tabular softmax
//! sequence policies where every gradient is analytic.

pub mod advantage;
pub mod curation;
pub mod io;
pub mod judge;
pub mod model;
pub mod rewards;
pub mod seeding;
pub mod template;
pub mod trainer;

pub use advantage::{
    equivalence_oracle, grpo_advantage, pairwise_advantage, AdvConfig, PreferenceMatrix,
};
pub use model::{
    label_sign, validate_example, BinaryChoice, Judgment, LabelKind, PreferenceExample,
    PreferenceLabel, TokenConvention, TrajectoryRecord,
};
