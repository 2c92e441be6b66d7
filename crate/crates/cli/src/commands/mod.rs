pub mod curate;
pub mod judge;
pub mod matrix;
pub mod oracle;
pub mod report;
pub mod train;

use anyhow::{bail, Result};
use pairadv_core::io::Strictness;
use std::path::{Path, PathBuf};

pub fn strictness(strict: bool) -> Strictness {
    if strict {
        Strictness::Strict
    } else {
        Strictness::Lenient
    }
}

/// Flag value if given, else the config-file path, else an error naming
/// the missing input.
pub fn required_path(
    flag: Option<PathBuf>,
    configured: &Option<PathBuf>,
    what: &str,
) -> Result<PathBuf> {
    match flag.or_else(|| configured.clone()) {
        Some(p) => Ok(p),
        None => bail!("no {what} path given (flag or config.paths)"),
    }
}

pub fn print_warnings(warnings: &[String]) {
    for w in warnings {
        eprintln!("warning: {w}");
    }
}

pub fn ensure_out(out: &Path) -> Result<()> {
    std::fs::create_dir_all(out)?;
    Ok(())
}
