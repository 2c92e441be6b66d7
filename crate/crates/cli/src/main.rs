mod commands;
mod config;

use anyhow::Result;
use clap::{Parser, Subcommand};
use config::RunConfig;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "pairadv",
    version,
    about = "Preference-based policy optimization experiments: curation, judging, matrices, training, oracles"
)]
struct Cli {
    /// JSON run configuration; defaults apply when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed override.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory for this run.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the warm-up SFT dataset from trajectory records.
    Curate(commands::curate::CurateArgs),
    /// Evaluate a judge on a preference dataset.
    Judge(commands::judge::JudgeArgs),
    /// Build and dump preference-strength matrices for response groups.
    Matrix(commands::matrix::MatrixArgs),
    /// Run a pointwise or pairwise RLHF training experiment.
    Train(commands::train::TrainArgs),
    /// Run the equivalence and gradient oracles.
    Oracle(commands::oracle::OracleArgs),
    /// Summarize metrics files to a CSV.
    Report(commands::report::ReportArgs),
}

fn run(cli: Cli) -> Result<()> {
    let cfg = RunConfig::load(cli.config.as_deref())?.resolve(cli.seed);
    let out = cli.out.as_path();
    match cli.command {
        Command::Curate(args) => commands::curate::run(args, cfg, out),
        Command::Judge(args) => commands::judge::run(args, cfg, out),
        Command::Matrix(args) => commands::matrix::run(args, cfg, out),
        Command::Train(args) => commands::train::run(args, cfg, out),
        Command::Oracle(args) => commands::oracle::run(args, cfg, out),
        Command::Report(args) => commands::report::run(args, cfg, out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            // One machine-parsable line; chained causes joined inline.
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}
