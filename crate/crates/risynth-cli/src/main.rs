//! `risynth` binary: run, re-evaluate, and sweep synthesis experiments.

use clap::{Args, Parser, Subcommand};
use risynth_cli::artifacts::read_text;
use risynth_cli::{parse_config, HarnessError, RunOptions};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "risynth",
    about = "Phase-only multi-beam pattern synthesis experiments",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonFlags {
    /// Output directory, overriding the config's output_dir
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Suppress progress output
    #[arg(long)]
    quiet: bool,
    /// Also write PNG heatmaps (fixed -40..0 dB scale)
    #[arg(long)]
    emit_heatmap: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment: superposition baseline, optimization, artifacts
    Run {
        /// TOML configuration file
        config: PathBuf,
        /// Seed override for this run
        #[arg(long)]
        seed: Option<u64>,
        #[command(flatten)]
        common: CommonFlags,
    },
    /// Re-evaluate a saved profile CSV under a configuration's scenario
    Pattern {
        /// Profile CSV (integer levels, no header)
        profile: PathBuf,
        /// TOML configuration file
        config: PathBuf,
        #[command(flatten)]
        common: CommonFlags,
    },
    /// Repeat `run` over a seed list and report median/IQR suppression
    Sweep {
        /// TOML configuration file
        config: PathBuf,
        /// Comma-separated seed list
        #[arg(long, value_delimiter = ',', required = true)]
        seeds: Vec<u64>,
        #[command(flatten)]
        common: CommonFlags,
    },
}

fn dispatch(cli: Cli) -> Result<(), HarnessError> {
    match cli.command {
        Command::Run {
            config,
            seed,
            common,
        } => {
            let parsed = parse_config(&read_text(&config)?)?;
            let options = RunOptions {
                seed,
                out: common.out,
                emit_heatmap: common.emit_heatmap,
                quiet: common.quiet,
            };
            risynth_cli::run_experiment(&parsed, &options)?;
            Ok(())
        }
        Command::Pattern {
            profile,
            config,
            common,
        } => {
            let parsed = parse_config(&read_text(&config)?)?;
            let text = read_text(&profile)?;
            let options = RunOptions {
                seed: None,
                out: common.out,
                emit_heatmap: common.emit_heatmap,
                quiet: common.quiet,
            };
            risynth_cli::evaluate_profile(&parsed, &text, &options)?;
            Ok(())
        }
        Command::Sweep {
            config,
            seeds,
            common,
        } => {
            let parsed = parse_config(&read_text(&config)?)?;
            let options = RunOptions {
                seed: None,
                out: common.out,
                emit_heatmap: common.emit_heatmap,
                quiet: common.quiet,
            };
            risynth_cli::run_sweep(&parsed, &seeds, &options)?;
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
