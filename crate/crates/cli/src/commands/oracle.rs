//! `pairadv oracle`: run the advantage-equivalence and gradient oracles
//! and fail loudly if either drifts.

use crate::commands::ensure_out;
use crate::config::RunConfig;
use anyhow::{bail, Result};
use clap::Args;
use pairadv_core::trainer::{equivalence_sweep, gradient_oracle};
use std::path::Path;

const EQUIVALENCE_TOL: f64 = 1e-9;
const GRADIENT_TOL: f64 = 1e-4;

#[derive(Debug, Args)]
pub struct OracleArgs {
    /// Random reward vectors per group size.
    #[arg(long, default_value_t = 1000)]
    pub groups: usize,
    /// Group size G for the equivalence sweep.
    #[arg(long, default_value_t = 8)]
    pub g: usize,
    /// Randomized instances for the gradient checks.
    #[arg(long, default_value_t = 100)]
    pub grad_instances: usize,
}

pub fn run(args: OracleArgs, cfg: RunConfig, out: &Path) -> Result<()> {
    ensure_out(out)?;
    cfg.write_resolved(out)?;

    let sweep = equivalence_sweep(cfg.seed, args.groups, args.g, cfg.adv.eps)?;
    println!(
        "equivalence g={} vectors={} max_abs_diff={:e}",
        sweep.group_size, sweep.vectors, sweep.max_abs_diff
    );
    let grads = gradient_oracle(cfg.seed, args.grad_instances)?;
    println!(
        "gradients instances={} sft={:e} kl={:e} surrogate={:e}",
        grads.instances, grads.max_sft_rel_err, grads.max_kl_rel_err, grads.max_surrogate_rel_err
    );

    if sweep.max_abs_diff > EQUIVALENCE_TOL {
        bail!(
            "equivalence oracle diverged: {:e} > {:e}",
            sweep.max_abs_diff,
            EQUIVALENCE_TOL
        );
    }
    if grads.max() > GRADIENT_TOL {
        bail!(
            "gradient oracle diverged: {:e} > {:e}",
            grads.max(),
            GRADIENT_TOL
        );
    }
    println!("oracle ok");
    Ok(())
}
