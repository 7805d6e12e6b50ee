use clap::{Parser, ValueEnum};
use stagmix_core::harness::{self, ExperimentConfig, HarnessError, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

/// Stag Hunt partner-choice experiments.
///
/// Exit status: 0 on success, 1 when an acceptance check fails, 2 for
/// configuration and other errors.
#[derive(Debug, Parser)]
#[command(name = "stagmix", version)]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    /// TOML experiment config. Every key has a default, so an empty file works.
    #[arg(long)]
    config: PathBuf,
    /// Overrides `master_seed`.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides `output_dir`.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Command {
    /// Closed-form payoffs over policies, k and rho.
    AnalyticCurves,
    /// Closed forms against the Monte Carlo oracle; exit 1 on disagreement.
    OracleCheck,
    /// Per-trial payoffs and discrimination histograms of the abstract game.
    AbstractSim,
    /// Schelling diagram of the boat race.
    Schelling,
    /// Association matrices of a focal bot in the boat race.
    Discrimination,
}

impl From<Command> for Subcommand {
    fn from(c: Command) -> Subcommand {
        match c {
            Command::AnalyticCurves => Subcommand::AnalyticCurves,
            Command::OracleCheck => Subcommand::OracleCheck,
            Command::AbstractSim => Subcommand::AbstractSim,
            Command::Schelling => Subcommand::Schelling,
            Command::Discrimination => Subcommand::Discrimination,
        }
    }
}

fn run(cli: &Cli) -> Result<harness::RunReport, HarnessError> {
    let mut config = ExperimentConfig::from_file(&cli.config)?;
    if let Some(seed) = cli.seed {
        config.master_seed = seed;
    }
    if let Some(out) = &cli.out {
        config.output_dir = out.clone();
    }
    harness::run(cli.command.into(), &config)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(report) => {
            for w in &report.warnings {
                eprintln!("warning: {w}");
            }
            for f in &report.files {
                println!("{}", f.display());
            }
            if !report.passed {
                eprintln!("stagmix {}: acceptance check failed", Subcommand::from(cli.command));
            }
            ExitCode::from(report.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("stagmix: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
