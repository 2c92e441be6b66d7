//! `pairadv curate`: build the warm-up SFT dataset from trajectory
//! records.

use crate::commands::{ensure_out, print_warnings, required_path, strictness};
use crate::config::RunConfig;
use anyhow::{Context, Result};
use clap::Args;
use pairadv_core::curation::{build_warmup_dataset, SelectionStrategy};
use pairadv_core::io::{load_examples, load_trajectories, save_warmups, WarmupRecord};
use std::path::{Path, PathBuf};

#[derive(Debug, Args)]
pub struct CurateArgs {
    /// Preference dataset JSONL.
    #[arg(long)]
    pub examples: Option<PathBuf>,
    /// Trajectory records JSONL.
    #[arg(long)]
    pub trajectories: Option<PathBuf>,
    /// Selection strategy override.
    #[arg(long, value_enum)]
    pub strategy: Option<StrategyArg>,
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
pub enum StrategyArg {
    Longest,
    Shortest,
}

pub fn run(args: CurateArgs, mut cfg: RunConfig, out: &Path) -> Result<()> {
    if let Some(s) = args.strategy {
        cfg.curation.strategy = match s {
            StrategyArg::Longest => SelectionStrategy::LongestCorrect,
            StrategyArg::Shortest => SelectionStrategy::ShortestCorrect,
        };
    }
    ensure_out(out)?;
    cfg.write_resolved(out)?;
    let strict = strictness(cfg.strict_io);
    let examples_path = required_path(args.examples, &cfg.paths.examples, "examples")?;
    let trajectories_path =
        required_path(args.trajectories, &cfg.paths.trajectories, "trajectories")?;

    let (examples, warnings) = load_examples(&examples_path, strict)
        .with_context(|| format!("loading {}", examples_path.display()))?;
    print_warnings(&warnings);
    let (trajectories, warnings) =
        load_trajectories(&trajectories_path, strict, cfg.token_convention)
            .with_context(|| format!("loading {}", trajectories_path.display()))?;
    print_warnings(&warnings);

    let (kept, report) = build_warmup_dataset(&examples, &trajectories, &cfg.curation)?;
    let records: Vec<WarmupRecord> = kept.iter().map(WarmupRecord::from).collect();
    let out_path = out.join("warmup.jsonl");
    save_warmups(&out_path, &records)?;

    println!(
        "kept={} discarded={} rate={} under_min={}",
        report.kept,
        report.discarded,
        report.discard_rate,
        report.under_min.len()
    );
    println!("wrote {}", out_path.display());
    Ok(())
}
