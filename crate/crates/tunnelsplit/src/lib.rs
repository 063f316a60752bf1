//! Config-driven scenario runner for `tunnelsplit-core`: parallel scans,
//! CSV/JSON output and the `tunnelsplit` command line.

// `!(x > 0.0)` guards deliberately reject NaN as well
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod batch;
pub mod commands;
pub mod config;
pub mod error;
pub mod output;

pub use config::{Format, RunConfig};
pub use error::{CliError, CliResult, EXIT_NUMERIC, EXIT_OK, EXIT_USAGE};
pub use output::{Output, Table};

/// Subcommand selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    Params,
    Decompose,
    Times,
    Larmor,
    Hartman,
}

/// Runs `cmd` on `pool`.
pub fn run(cmd: Command, cfg: &RunConfig, pool: &rayon::ThreadPool) -> CliResult<Output> {
    cfg.validate()?;
    match cmd {
        Command::Params => commands::params(cfg, pool),
        Command::Decompose => commands::decompose(cfg, pool),
        Command::Times => commands::times(cfg, pool),
        Command::Larmor => commands::larmor(cfg, pool),
        Command::Hartman => commands::hartman(cfg, pool),
    }
}
