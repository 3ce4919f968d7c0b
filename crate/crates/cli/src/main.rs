//! `fuzzy-bandit`: run the n-armed bandit benchmark, sweep policy parameters,
//! export fuzzy membership functions and plot learning curves.
//!
//! Exit codes: 0 success, 1 bad config or arguments, 2 I/O failure.

mod commands;
mod grid;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "fuzzy-bandit", version, about = "Fuzzy action-selection bandit benchmark")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every configured policy and write curve.csv, summary.json, manifest.json.
    Run(RunArgs),
    /// Run one experiment per parameter value and write sweep.csv.
    Sweep(SweepArgs),
    /// Export the membership functions of a rule base as CSV (and SVG).
    Membership(MembershipArgs),
    /// Render a curve.csv as an SVG line chart.
    Plot(PlotArgs),
}

#[derive(Args, Debug, Default)]
pub struct Overrides {
    /// Override `base_seed`.
    #[arg(long)]
    seed: Option<u64>,
    /// Override `runs`.
    #[arg(long)]
    runs: Option<usize>,
    /// Override `plays`.
    #[arg(long)]
    plays: Option<usize>,
    /// Override `n_arms`.
    #[arg(long)]
    arms: Option<usize>,
}

#[derive(Args)]
pub struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[command(flatten)]
    overrides: Overrides,
}

#[derive(Args)]
pub struct SweepArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[command(flatten)]
    overrides: Overrides,
    /// Fuzzy xi values: `a,b,c` or `start:step:end`.
    #[arg(long)]
    xi: Option<String>,
    /// Softmax temperatures.
    #[arg(long)]
    tau: Option<String>,
    /// Epsilon-greedy exploration rates.
    #[arg(long)]
    epsilon: Option<String>,
}

#[derive(Args)]
pub struct MembershipArgs {
    /// Number of rules (actions).
    #[arg(long, default_value_t = 10)]
    arms: usize,
    #[arg(long)]
    xi: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    alpha: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    beta: f64,
    /// Samples per curve.
    #[arg(long, default_value_t = 201)]
    resolution: usize,
    /// CSV output path.
    #[arg(long, default_value = "membership.csv")]
    out: PathBuf,
    /// Also write an SVG overlay of the output membership functions next to the CSV.
    #[arg(long)]
    svg: bool,
}

#[derive(Args)]
pub struct PlotArgs {
    /// Input curve.csv.
    #[arg(long)]
    curve: PathBuf,
    /// Output SVG path.
    #[arg(long, default_value = "curve.svg")]
    out: PathBuf,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let outcome = match &cli.command {
        Command::Run(args) => commands::run(args),
        Command::Sweep(args) => commands::sweep_cmd(args),
        Command::Membership(args) => commands::membership(args),
        Command::Plot(args) => commands::plot(args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
