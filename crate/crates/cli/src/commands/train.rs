//! `pairadv train`: run a pointwise or pairwise RLHF experiment on the
//! seeded synthetic task.

use crate::commands::ensure_out;
use crate::config::RunConfig;
use anyhow::Result;
use clap::Args;
use pairadv_core::advantage::MatrixConfig;
use pairadv_core::io::write_metrics_csv;
use pairadv_core::seeding::substream;
use pairadv_core::trainer::{train_rlhf, AdvMode, PairwiseJudgeConfig, SyntheticTask};
use std::path::Path;

#[derive(Debug, Args)]
pub struct TrainArgs {
    /// Advantage estimation mode.
    #[arg(long, value_enum)]
    pub adv: AdvArg,
    /// Step-count override.
    #[arg(long)]
    pub steps: Option<usize>,
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
pub enum AdvArg {
    Pointwise,
    Pairwise,
}

pub fn run(args: TrainArgs, mut cfg: RunConfig, out: &Path) -> Result<()> {
    if let Some(steps) = args.steps {
        cfg.train.steps = steps;
    }
    ensure_out(out)?;
    cfg.write_resolved(out)?;

    let mut task_rng = substream(cfg.seed, "task");
    let task = SyntheticTask::random(cfg.task.vocab_size, cfg.task.seq_len, &mut task_rng);
    let (mode, judge) = match args.adv {
        AdvArg::Pointwise => (AdvMode::PointwiseRule, None),
        AdvArg::Pairwise => (
            AdvMode::PairwiseMatrix,
            Some(PairwiseJudgeConfig {
                sim: cfg.judge.sim,
                kind: cfg.judge.kind,
                matrix: MatrixConfig {
                    // Roles are never randomized inside the training loop.
                    randomize_roles: false,
                    ..cfg.matrix.clone()
                },
            }),
        ),
    };
    let run = train_rlhf(&task, judge.as_ref(), &cfg.train, mode)?;

    let metrics_path = out.join("metrics.csv");
    write_metrics_csv(&metrics_path, &run.metrics)?;
    println!(
        "adv={} steps={} initial={} final={} improvement={}",
        match args.adv {
            AdvArg::Pointwise => "pointwise",
            AdvArg::Pairwise => "pairwise",
        },
        cfg.train.steps,
        run.initial_mean_true_reward(),
        run.final_mean_true_reward(),
        run.final_mean_true_reward() - run.initial_mean_true_reward()
    );
    println!("wrote {}", metrics_path.display());
    Ok(())
}
