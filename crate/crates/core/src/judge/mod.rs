//! Judges: a simulated oracle, a remote chat-completion client, and
//! majority-vote aggregation over repeated judgments.

mod remote;
mod sim;
mod vote;

pub use remote::{remote_judge, remote_judge_many, RemoteJudgeConfig};
pub use sim::{sim_judge, SimJudgeConfig};
pub use vote::{majority_vote, vote_with, TieBreak, VoteConfig, VoteOutcome};

use crate::template::ParseError;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum JudgeError {
    #[error("transport: {0}")]
    Transport(String),
    /// The judge produced text we could not parse; retained for audit.
    #[error("unparseable judge output ({source}): {raw:?}")]
    Parse { raw: String, source: ParseError },
    #[error("negative true gap {gap}")]
    NegativeGap { gap: f64 },
    #[error("empty ballot")]
    EmptyBallot,
    #[error("mixed label kinds in ballot")]
    KindMismatch,
    #[error("invalid judge config: {0}")]
    InvalidConfig(String),
}
