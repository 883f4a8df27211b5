mod artifacts;
mod commands;
mod failure;
mod settings;

use clap::{Parser, Subcommand};

use crate::failure::Failure;
use crate::settings::Flags;

/// Error dependence plots and distribution rules for classifier predictions.
///
/// Exit codes: 0 success, 1 internal error, 2 configuration error, 3 data error.
#[derive(Debug, Parser)]
#[command(name = "devperf", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Cross-validate a built-in learner and write per-case predictions
    Predict(Flags),
    /// Write an error dependence plot, its error zoom and JSON per predictor
    Edp(Flags),
    /// Mine distribution rules, optionally testing one named subgroup
    Rules(Flags),
    /// Predictions, all EDPs and rules in one directory with a manifest
    Report(Flags),
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Predict(f) => commands::cmd_predict(settings::resolve(f)?),
        Command::Edp(f) => commands::cmd_edp(settings::resolve(f)?),
        Command::Rules(f) => commands::cmd_rules(settings::resolve(f)?),
        Command::Report(f) => commands::cmd_report(settings::resolve(f)?),
    }
}

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if let Err(f) = run(cli) {
        eprintln!("devperf: {f}");
        std::process::exit(f.exit_code());
    }
}
