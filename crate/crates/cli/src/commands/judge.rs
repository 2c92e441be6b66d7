//! `pairadv judge`: evaluate a judge on a preference dataset, optionally
//! with majority voting over m samples per example.

use crate::commands::{ensure_out, print_warnings, required_path, strictness};
use crate::config::{JudgeMode, RunConfig};
use anyhow::{bail, Context, Result};
use clap::Args;
use pairadv_core::io::load_examples;
use pairadv_core::judge::{remote_judge, sim_judge, vote_with, VoteConfig};
use pairadv_core::model::{label_sign, LabelKind, PreferenceExample, PreferenceLabel};
use pairadv_core::rewards::rule_reward;
use pairadv_core::seeding::substream;
use serde::Serialize;
use std::io::Write;
use std::path::{Path, PathBuf};

#[derive(Debug, Args)]
pub struct JudgeArgs {
    /// Preference dataset JSONL.
    #[arg(long)]
    pub dataset: Option<PathBuf>,
    /// Majority-vote over this many judgments per example (default 1).
    #[arg(long)]
    pub vote: Option<usize>,
}

#[derive(Serialize)]
struct JudgmentRow<'a> {
    example_id: &'a str,
    predicted_label: PreferenceLabel,
    ballot_size: usize,
    dropped: usize,
}

fn dataset_kind(examples: &[PreferenceExample]) -> Result<LabelKind> {
    let Some(first) = examples.first() else {
        bail!("dataset is empty");
    };
    let kind = first.gold_label.kind();
    if examples.iter().any(|e| e.gold_label.kind() != kind) {
        bail!("dataset mixes binary and multiclass gold labels");
    }
    Ok(kind)
}

pub fn run(args: JudgeArgs, cfg: RunConfig, out: &Path) -> Result<()> {
    ensure_out(out)?;
    cfg.write_resolved(out)?;
    let dataset_path = required_path(args.dataset, &cfg.paths.dataset, "dataset")?;
    let (examples, warnings) = load_examples(&dataset_path, strictness(cfg.strict_io))
        .with_context(|| format!("loading {}", dataset_path.display()))?;
    print_warnings(&warnings);
    let kind = dataset_kind(&examples)?;

    let m = args.vote.unwrap_or(1).max(1);
    let vote_cfg = VoteConfig { m, ..cfg.vote };
    // Separate streams for judgment sampling and tie-breaking.
    let mut sample_rng = substream(cfg.seed, "judge-samples");
    let mut vote_rng = substream(cfg.seed, "judge-ties");

    let mut rows = Vec::with_capacity(examples.len());
    let mut exact = 0usize;
    let mut sign_hits = 0usize;
    let mut reward_sum = 0.0f64;
    let mut errors = 0usize;
    let mut skipped = 0usize;
    for ex in &examples {
        let outcome = vote_with(&vote_cfg, &mut vote_rng, |_| match cfg.judge.mode {
            JudgeMode::Sim => sim_judge(ex, cfg.judge.sim_gap, &cfg.judge.sim, &mut sample_rng),
            JudgeMode::Remote => remote_judge(ex, kind, &cfg.judge.remote, cfg.token_convention),
        });
        match outcome {
            Ok(vote) => {
                errors += vote.dropped;
                if vote.label == ex.gold_label {
                    exact += 1;
                }
                if label_sign(&vote.label) == label_sign(&ex.gold_label) {
                    sign_hits += 1;
                }
                reward_sum += rule_reward(&vote.label, &ex.gold_label)?;
                rows.push((ex.id.clone(), vote));
            }
            Err(e) => {
                // An example whose every sample failed counts as an error
                // and scores zero.
                errors += m;
                skipped += 1;
                eprintln!("warning: example {}: {e}", ex.id);
            }
        }
    }

    let out_path = out.join("judgments.jsonl");
    let mut file = std::fs::File::create(&out_path)?;
    for (id, vote) in &rows {
        let row = JudgmentRow {
            example_id: id,
            predicted_label: vote.label,
            ballot_size: vote.ballot_size,
            dropped: vote.dropped,
        };
        writeln!(file, "{}", serde_json::to_string(&row)?)?;
    }

    let n = examples.len();
    println!(
        "n={} m={} accuracy={} sign_accuracy={} mean_rule_reward={} judge_errors={} skipped={}",
        n,
        m,
        exact as f64 / n as f64,
        sign_hits as f64 / n as f64,
        reward_sum / n as f64,
        errors,
        skipped
    );
    println!("wrote {}", out_path.display());
    Ok(())
}
