//! Command-line front end: configuration, orchestration and export.

pub mod config;
pub mod run;
pub mod table;
pub mod xcheck;

use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::Variant;
use config::{Mode, RunConfig};
use table::Format;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
enum VariantArg {
    Corrected,
    AsPrinted,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Corrected => Variant::Corrected,
            VariantArg::AsPrinted => Variant::AsPrinted,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "cavity-vdw",
    version,
    about = "Strong-coupling van der Waals potentials and forces in a cavity"
)]
struct Cli {
    #[command(subcommand)]
    command: Option<Command>,

    /// TOML run configuration. Without it every value takes its default.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output table; the manifest goes to `<out>.manifest.json`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    #[arg(long, global = true, value_enum)]
    variant: Option<VariantArg>,

    /// Relative quadrature tolerance.
    #[arg(long, global = true)]
    tolerance: Option<f64>,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum Command {
    /// Rabi contributions along a position sweep.
    ScanRabi,
    /// Dressed energies and coupling angle along a sweep.
    Dressed,
    /// Position-dependent potentials (planar) or the free-space interaction.
    Potential,
    /// Eigenstate and superposition forces along a sweep.
    Force,
    /// Dressed potentials against their weak-coupling limit.
    WeakLimit,
    /// Principal-value transform against the narrow-mode identity.
    KkCheck,
    /// Seeded cross-validation suite.
    Xcheck,
}

impl From<Command> for Mode {
    fn from(c: Command) -> Self {
        match c {
            Command::ScanRabi => Mode::ScanRabi,
            Command::Dressed => Mode::Dressed,
            Command::Potential => Mode::Potential,
            Command::Force => Mode::Force,
            Command::WeakLimit => Mode::WeakLimit,
            Command::KkCheck => Mode::KkCheck,
            Command::Xcheck => Mode::Xcheck,
        }
    }
}

fn execute(cli: Cli) -> crate::Result<i32> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default_config()?,
    };
    let mode = match (cli.command, cfg.mode) {
        (Some(c), _) => Mode::from(c),
        (None, Some(m)) => m,
        (None, None) => {
            return Err(crate::Error::Config {
                key: "mode".into(),
                msg: "no subcommand given and the config sets no mode".into(),
            })
        }
    };
    if let Some(v) = cli.variant {
        cfg.set_cli("variant", |c| c.variant = v.into());
    }
    if let Some(t) = cli.tolerance {
        cfg.set_cli("tolerances.quad_rel", |c| c.tolerances.quad_rel = t);
    }
    if let Some(f) = cli.format {
        cfg.set_cli("output.format", |c| c.output.format = f);
    }
    if let Some(p) = &cli.out {
        cfg.set_cli("output.path", |c| c.output.path = Some(p.clone()));
    }
    let format = cfg.output.format;
    let path = cfg
        .output
        .path
        .clone()
        .unwrap_or_else(|| PathBuf::from(format!("{}.{}", mode.as_str(), format.extension())));
    // the path itself does not affect results, keep it out of the hash
    cfg.output.path = None;

    let out = run::run(&cfg, mode)?;
    let manifest = out.write(&path, format)?;
    log::info!(
        "wrote {} rows to {} ({})",
        out.table.len(),
        path.display(),
        manifest.display()
    );
    if out.failed_checks > 0 {
        eprintln!("xcheck: {} check(s) exceeded tolerance", out.failed_checks);
    }
    Ok(exit_code(out.failed_checks))
}

fn exit_code(failed_checks: usize) -> i32 {
    if failed_checks > 0 {
        2
    } else {
        0
    }
}

/// Parses arguments, runs, and returns the process exit code:
/// 0 on success, 1 on any error, 2 when `xcheck` finds a failed check.
pub fn main() -> i32 {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match execute(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn failed_checks_exit_two() {
        assert_eq!(exit_code(0), 0);
        assert_eq!(exit_code(3), 2);
    }

    #[test]
    fn cli_parses_global_flags_after_subcommand() {
        let cli =
            Cli::try_parse_from(["cavity-vdw", "xcheck", "--tolerance", "1e-9", "--variant", "as-printed"]).unwrap();
        assert!(matches!(cli.command, Some(Command::Xcheck)));
        assert_eq!(cli.tolerance, Some(1e-9));
        assert_eq!(cli.variant, Some(VariantArg::AsPrinted));
        assert!(Cli::try_parse_from(["cavity-vdw", "scan-rabi", "--format", "xml"]).is_err());
    }
}
