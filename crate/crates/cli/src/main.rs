use std::process::ExitCode;

use clap::{Parser, Subcommand};
use privmarket_cli::commands::{
    cmd_concentration, cmd_dp_audit, cmd_loss_curve, cmd_privacy_probe, cmd_wager_demo,
};
use privmarket_cli::{CliError, ExperimentConfig, Report};

#[derive(Debug, Parser)]
#[command(
    name = "privmarket",
    version,
    about = "Private wagering and noisy market experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run both wagering mechanisms on a random profile.
    WagerDemo(ExperimentConfig),
    /// Exhaustively certify the joint privacy ratio of the private mechanism.
    DpAudit(ExperimentConfig),
    /// Check realized profits against the concentration bound.
    Concentration(ExperimentConfig),
    /// Maker loss against the target strategy as the horizon grows.
    LossCurve(ExperimentConfig),
    /// Implied privacy floor from the target/deviation strategy pair.
    PrivacyProbe(ExperimentConfig),
}

fn run(command: &Command) -> Result<Report, CliError> {
    match command {
        Command::WagerDemo(c) => cmd_wager_demo(c),
        Command::DpAudit(c) => cmd_dp_audit(c),
        Command::Concentration(c) => cmd_concentration(c),
        Command::LossCurve(c) => cmd_loss_curve(c),
        Command::PrivacyProbe(c) => cmd_privacy_probe(c),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli.command) {
        Ok(report) => {
            for file in &report.files {
                println!("wrote {}", file.display());
            }
            for violation in &report.violations {
                eprintln!("invariant violated: {violation}");
            }
            ExitCode::from(report.exit_code() as u8)
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
