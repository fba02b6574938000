//! Command-line front end for the glacial-cycle experiments.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use glacial_cycles::experiments::{
    self, load_config, CliError,
};

#[derive(Parser)]
#[command(
    name = "glacial-cycles",
    about = "Equilibria, hybrid trajectories, periodic orbits and bifurcation sweeps \
             of a discontinuous three-variable glacial-cycle model",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, clap::Args)]
struct CommonArgs {
    /// Configuration file (`key = value` lines with dotted namespaces).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (overrides `output.dir`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Individual overrides applied after the config file, e.g.
    /// `--set params.epsilon=0.003`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Report all equilibria of both regimes with stability and
    /// regular/virtual/boundary classification.
    Equilibria(CommonArgs),
    /// Integrate one hybrid trajectory and emit samples plus the event log.
    Simulate(CommonArgs),
    /// Locate the attracting periodic orbit and emit one closed period.
    Orbit(CommonArgs),
    /// Sweep the advance ablation rate b0 through the boundary-equilibrium
    /// bifurcation.
    SweepB0(CommonArgs),
    /// Sample the nullclines, tangency curves and switching line over the
    /// snow-line interval.
    Nullclines(CommonArgs),
    /// Check the configured epsilon against the tangency-intersection bound.
    CheckEpsilon(CommonArgs),
}

fn run(command: &Command) -> Result<(), CliError> {
    let args = match command {
        Command::Equilibria(a)
        | Command::Simulate(a)
        | Command::Orbit(a)
        | Command::SweepB0(a)
        | Command::Nullclines(a)
        | Command::CheckEpsilon(a) => a,
    };
    let config = load_config(args.config.as_deref(), &args.set, args.out.as_deref())?;
    match command {
        Command::Equilibria(_) => experiments::cmd_equilibria(&config).map(|_| ()),
        Command::Simulate(_) => experiments::cmd_simulate(&config).map(|_| ()),
        Command::Orbit(_) => experiments::cmd_orbit(&config).map(|_| ()),
        Command::SweepB0(_) => experiments::cmd_sweep_b0(&config).map(|_| ()),
        Command::Nullclines(_) => experiments::cmd_nullclines(&config).map(|_| ()),
        Command::CheckEpsilon(_) => experiments::cmd_check_epsilon(&config).map(|_| ()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
