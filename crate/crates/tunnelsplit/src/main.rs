use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use tunnelsplit::{batch, output, run, CliResult, Command, Format, RunConfig, EXIT_USAGE};

#[derive(Debug, Parser)]
#[command(name = "tunnelsplit", version, about = "Transmission/reflection decomposition and tunneling times")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
    /// TOML run configuration; defaults apply when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file (default: stdout).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true, env = "TUNNELSPLIT_THREADS")]
    threads: Option<usize>,
    /// Override a config key, e.g. `--set scan.k=1.5`; repeatable.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

#[derive(Debug, Subcommand)]
enum Sub {
    /// T, R, J, F over the k scan.
    Params,
    /// Full, transmission and reflection wave functions with fluxes.
    Decompose,
    /// Dwell, clock-offset and comparison times over the k scan.
    Times,
    /// Spinor Larmor-clock simulation report.
    Larmor,
    /// Times over the barrier-width scan.
    Hartman,
}

fn execute(cli: Cli) -> CliResult<()> {
    let mut cfg = RunConfig::with_overrides(cli.config.as_deref(), &cli.overrides)?;
    if let Some(f) = cli.format {
        cfg.output.format = f;
    }
    if let Some(p) = cli.out {
        cfg.output.path = Some(p);
    }
    let pool = batch::pool(cli.threads)?;
    let cmd = match cli.command {
        Sub::Params => Command::Params,
        Sub::Decompose => Command::Decompose,
        Sub::Times => Command::Times,
        Sub::Larmor => Command::Larmor,
        Sub::Hartman => Command::Hartman,
    };
    let out = run(cmd, &cfg, &pool)?;
    let text = out.render(cfg.output.format, cfg.output.precision)?;
    output::emit(&text, cfg.output.path.as_deref())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("tunnelsplit: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
