//! Configuration handling, serialized outputs, and the experiment commands
//! exposed through the CLI.

mod commands;
mod config;
pub mod output;
mod sweep;

pub use commands::{
    cmd_check_epsilon, cmd_equilibria, cmd_nullclines, cmd_orbit, cmd_simulate,
    retreat_sink_projection, EpsilonReport, EquilibriaReport, NullclineReport, OrbitSummary,
    SimulateSummary, NULLCLINE_HEADER,
};
pub use config::{
    load_config, ConfigBuilder, NullclineSettings, OrbitSettings, RunConfig, SimulateSettings,
    SweepSettings,
};
pub use sweep::{cmd_sweep_b0, SweepBlock, SweepOutcome, SweepRecord, SweepReport};

/// Command-level errors, split by the exit code they map to: configuration
/// and I/O problems exit 1, numerical failures exit 2.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io(_) => 1,
            CliError::Numerical(_) => 2,
        }
    }
}
