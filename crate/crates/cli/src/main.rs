//! Experiment runner CLI.
//!
//! Verbs: `run <config>`, `preset <name>`, `validate <config>`,
//! `oracle <config>`. Exit codes: 0 success, 2 config error, 3 physics
//! rejection (instability), 4 numerical failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use entsim_cli::config::{ExperimentConfig, OutputFormat, PropagatorChoice};
use entsim_cli::presets::Preset;
use entsim_cli::runner::{self, CliError};

#[derive(Parser)]
#[command(
    name = "entsim",
    about = "Entanglement dynamics of two molecular ensembles in a cavity: presets, sweeps, exact-oracle validation and homodyne readout"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CommonFlags {
    /// Output directory for artifact files.
    #[arg(long, default_value = "out")]
    out_dir: PathBuf,
    /// RNG seed override (readout sampling).
    #[arg(long)]
    seed: Option<u64>,
    /// Propagator construction override.
    #[arg(long, value_parser = parse_propagator)]
    propagator: Option<PropagatorChoice>,
    /// Output format override.
    #[arg(long, value_parser = parse_format)]
    format: Option<OutputFormat>,
}

fn parse_propagator(s: &str) -> Result<PropagatorChoice, String> {
    match s {
        "normal-mode" => Ok(PropagatorChoice::NormalMode),
        "expm" => Ok(PropagatorChoice::Expm),
        _ => Err(format!("unknown propagator {s:?} (expected normal-mode or expm)")),
    }
}

fn parse_format(s: &str) -> Result<OutputFormat, String> {
    match s {
        "csv" => Ok(OutputFormat::Csv),
        "svg" => Ok(OutputFormat::Svg),
        "both" => Ok(OutputFormat::Both),
        _ => Err(format!("unknown format {s:?} (expected csv, svg or both)")),
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a TOML config.
    Run {
        config: PathBuf,
        #[command(flatten)]
        flags: CommonFlags,
    },
    /// Run a built-in preset: fig2, fig3, oracle-convergence, readout-demo.
    Preset {
        name: String,
        #[command(flatten)]
        flags: CommonFlags,
    },
    /// Parse and validate a config without running it.
    Validate { config: PathBuf },
    /// Run the exact-oracle convergence study from a config.
    Oracle {
        config: PathBuf,
        #[command(flatten)]
        flags: CommonFlags,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn apply_flags(cfg: &mut ExperimentConfig, flags: &CommonFlags) {
    if let Some(seed) = flags.seed {
        cfg.run.seed = seed;
    }
    if let Some(p) = flags.propagator {
        cfg.run.propagator = p;
    }
    if let Some(f) = flags.format {
        cfg.run.format = f;
    }
}

fn load_config(path: &std::path::Path) -> Result<ExperimentConfig, CliError> {
    ExperimentConfig::from_path(path).map_err(|e| CliError::Config(e.to_string()))
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Run { config, flags } => {
            let mut cfg = load_config(&config)?;
            apply_flags(&mut cfg, &flags);
            run_everything(&cfg, &flags)
        }
        Command::Preset { name, flags } => {
            let preset = Preset::parse(&name).ok_or_else(|| {
                CliError::Config(format!(
                    "unknown preset {name:?}; available: {}",
                    Preset::NAMES.join(", ")
                ))
            })?;
            let mut cfg = preset.config();
            apply_flags(&mut cfg, &flags);
            match preset {
                Preset::OracleConvergence => report_oracle(&cfg, &flags),
                Preset::ReadoutDemo => report_readout(&cfg, &flags),
                _ => run_everything(&cfg, &flags),
            }
        }
        Command::Validate { config } => {
            load_config(&config)?;
            println!("ok: {}", config.display());
            Ok(())
        }
        Command::Oracle { config, flags } => {
            let mut cfg = load_config(&config)?;
            apply_flags(&mut cfg, &flags);
            report_oracle(&cfg, &flags)
        }
    }
}

/// Runs the time-series sweep; when the config carries oracle or readout
/// sections those studies run as well.
fn run_everything(cfg: &ExperimentConfig, flags: &CommonFlags) -> Result<(), CliError> {
    let artifacts = runner::run_series(cfg, &flags.out_dir)?;
    if let Some(p) = &artifacts.csv_path {
        println!("wrote {}", p.display());
    }
    if let Some(p) = &artifacts.svg_path {
        println!("wrote {}", p.display());
    }
    println!("wrote {}", artifacts.summary_path.display());
    if cfg.oracle.is_some() {
        report_oracle(cfg, flags)?;
    }
    if cfg.readout.is_some() {
        report_readout(cfg, flags)?;
    }
    Ok(())
}

fn report_oracle(cfg: &ExperimentConfig, flags: &CommonFlags) -> Result<(), CliError> {
    let outcome = runner::run_oracle(cfg, &flags.out_dir)?;
    for row in &outcome.rows {
        println!(
            "oracle N={}: omega/g={:.4}, cutoff={}, max |exact - gaussian| = {:.3e}",
            row.n, row.omega_over_g, row.photon_cutoff, row.max_abs_dev
        );
    }
    println!(
        "oracle convergence monotone decreasing: {}",
        outcome.monotone_decreasing
    );
    println!("wrote {}", outcome.csv_path.display());
    Ok(())
}

fn report_readout(cfg: &ExperimentConfig, flags: &CommonFlags) -> Result<(), CliError> {
    let outcome = runner::run_readout(cfg, &flags.out_dir)?;
    println!(
        "readout: true lnN = {:.4} bits, reconstructed {:.4} +- {:.4}",
        outcome.true_log_negativity,
        outcome.estimate.log_negativity,
        outcome.estimate.std_error
    );
    println!(
        "entangled at 3 sigma: {}",
        outcome.estimate.entangled_at_sigma(3.0)
    );
    println!("wrote {}", outcome.csv_path.display());
    Ok(())
}
