//! `pairadv report`: summarize one or more metrics files into a single
//! CSV.

use crate::commands::ensure_out;
use crate::config::RunConfig;
use anyhow::{bail, Result};
use clap::Args;
use pairadv_core::io::read_metrics_csv;
use std::io::Write;
use std::path::{Path, PathBuf};

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Metrics CSV files produced by `train`.
    #[arg(long, required = true, num_args = 1..)]
    pub metrics: Vec<PathBuf>,
}

const SUMMARY_HEADER: &str =
    "run,steps,initial_mean_true_reward,final_mean_true_reward,mean_kl,total_judge_errors";

pub fn run(args: ReportArgs, cfg: RunConfig, out: &Path) -> Result<()> {
    ensure_out(out)?;
    cfg.write_resolved(out)?;
    let summary_path = out.join("summary.csv");
    let mut file = std::fs::File::create(&summary_path)?;
    writeln!(file, "{SUMMARY_HEADER}")?;
    println!("{SUMMARY_HEADER}");
    for path in &args.metrics {
        let rows = read_metrics_csv(path)?;
        if rows.is_empty() {
            bail!("{} has no metric rows", path.display());
        }
        let name = path
            .parent()
            .and_then(|p| p.file_name())
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| path.display().to_string());
        let mean_kl = rows.iter().map(|r| r.kl).sum::<f64>() / rows.len() as f64;
        let errors: usize = rows.iter().map(|r| r.judge_errors).sum();
        let line = format!(
            "{},{},{},{},{},{}",
            name,
            rows.len(),
            rows.first().unwrap().mean_true_reward,
            rows.last().unwrap().mean_true_reward,
            mean_kl,
            errors
        );
        writeln!(file, "{line}")?;
        println!("{line}");
    }
    println!("wrote {}", summary_path.display());
    Ok(())
}
