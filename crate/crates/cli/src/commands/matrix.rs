//! `pairadv matrix`: build and dump preference-strength matrices for a
//! response-group file.

use crate::commands::{ensure_out, print_warnings, required_path, strictness};
use crate::config::{JudgeMode, RunConfig};
use anyhow::{bail, Context, Result};
use clap::Args;
use pairadv_core::advantage::{build_preference_matrix, pairwise_advantage};
use pairadv_core::io::{load_response_groups, save_matrices, ResponseGroup};
use pairadv_core::judge::{remote_judge, sim_judge, JudgeError};
use pairadv_core::model::{BinaryChoice, LabelKind, PreferenceExample, PreferenceLabel};
use pairadv_core::seeding::substream;
use rand_chacha::ChaCha8Rng;
use std::path::{Path, PathBuf};

#[derive(Debug, Args)]
pub struct MatrixArgs {
    /// Response groups JSONL ({group_id, prompt, responses, true_rewards?}).
    #[arg(long)]
    pub groups: Option<PathBuf>,
}

fn pair_example(group: &ResponseGroup, a: usize, b: usize, kind: LabelKind) -> PreferenceExample {
    // Gold direction only matters for the simulated judge, which reads it
    // from the true rewards; remote judging ignores it.
    let gold_label = match (kind, group.true_rewards.as_ref()) {
        (LabelKind::Binary, Some(r)) if r[a] < r[b] => PreferenceLabel::Binary(BinaryChoice::B),
        (LabelKind::Binary, _) => PreferenceLabel::Binary(BinaryChoice::A),
        (LabelKind::Multiclass, Some(r)) if r[a] < r[b] => PreferenceLabel::Multiclass(1),
        (LabelKind::Multiclass, _) => PreferenceLabel::Multiclass(-1),
    };
    PreferenceExample {
        id: format!("{}-{a}-{b}", group.group_id),
        context: group.prompt.clone(),
        response_a: group.responses[a].clone(),
        response_b: group.responses[b].clone(),
        gold_label,
    }
}

fn judge_group(
    group: &ResponseGroup,
    cfg: &RunConfig,
    role_rng: &mut ChaCha8Rng,
    judge_rng: &mut ChaCha8Rng,
) -> Result<(pairadv_core::advantage::PreferenceMatrix, usize)> {
    let g = group.responses.len();
    if g < 2 {
        bail!(
            "group {} has {} responses, need at least 2",
            group.group_id,
            g
        );
    }
    if cfg.judge.mode == JudgeMode::Sim {
        let rewards = group.true_rewards.as_ref().with_context(|| {
            format!(
                "group {}: simulated judging needs true_rewards",
                group.group_id
            )
        })?;
        if rewards.len() != g {
            bail!(
                "group {}: {} rewards for {} responses",
                group.group_id,
                rewards.len(),
                g
            );
        }
    }
    let kind = cfg.judge.kind;
    let (matrix, stats) = build_preference_matrix(
        &group.group_id,
        g,
        kind,
        &cfg.matrix,
        role_rng,
        |a, b| -> Result<_, JudgeError> {
            let ex = pair_example(group, a, b, kind);
            match cfg.judge.mode {
                JudgeMode::Sim => {
                    let rewards = group.true_rewards.as_ref().expect("checked above");
                    let gap = (rewards[a] - rewards[b]).abs();
                    sim_judge(&ex, gap, &cfg.judge.sim, judge_rng)
                }
                JudgeMode::Remote => {
                    remote_judge(&ex, kind, &cfg.judge.remote, cfg.token_convention)
                }
            }
        },
    )?;
    for f in &stats.failures {
        eprintln!(
            "warning: group {} pair ({},{}): {}",
            group.group_id, f.i, f.j, f.error
        );
    }
    Ok((matrix, stats.failures.len()))
}

pub fn run(args: MatrixArgs, cfg: RunConfig, out: &Path) -> Result<()> {
    ensure_out(out)?;
    cfg.write_resolved(out)?;
    let groups_path = required_path(args.groups, &cfg.paths.groups, "groups")?;
    let (groups, warnings) = load_response_groups(&groups_path, strictness(cfg.strict_io))
        .with_context(|| format!("loading {}", groups_path.display()))?;
    print_warnings(&warnings);

    let mut role_rng = substream(cfg.seed, "matrix-roles");
    let mut judge_rng = substream(cfg.seed, "matrix-judge");
    let mut matrices = Vec::with_capacity(groups.len());
    for group in &groups {
        let (matrix, failures) = judge_group(group, &cfg, &mut role_rng, &mut judge_rng)?;
        let advantages = pairwise_advantage(&matrix, &cfg.adv)?;
        println!(
            "group={} g={} failures={} advantages={:?}",
            group.group_id, matrix.g, failures, advantages
        );
        matrices.push(matrix);
    }
    let out_path = out.join("matrices.jsonl");
    save_matrices(&out_path, &matrices)?;
    println!("wrote {}", out_path.display());
    Ok(())
}
