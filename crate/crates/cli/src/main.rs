mod args;
mod commands;
mod config;
mod error;
mod output;

use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;
use serde::Serialize;

use args::{Cli, Command, Format};
use commands::{exit_code, summarize, Cell};
use config::RunConfig;
use error::CliError;
use output::Tabular;

/// Sizes the global rayon pool from `QHARDY_NUM_THREADS` when it is set.
fn init_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("QHARDY_NUM_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Config(format!("QHARDY_NUM_THREADS must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Config(format!("cannot start {n} threads: {e}")))
}

fn finish<T: Serialize + Tabular>(command: &str, cfg: &RunConfig, cells: Vec<Cell<T>>) -> Result<u8, CliError> {
    let bytes = match cfg.format {
        Format::Json => output::json(command, cfg, &cells)?,
        Format::Csv => output::csv(&cells)?,
    };
    output::emit(&bytes, cfg)?;
    let s = summarize(&cells);
    eprintln!(
        "{command}: {} cells, {} ok, {} skipped, {} violations, {} non-convergent",
        s.cells, s.ok, s.skipped, s.violations, s.non_convergent
    );
    Ok(exit_code(&cells))
}

fn run(cli: &Cli) -> Result<u8, CliError> {
    init_threads()?;
    let cfg = RunConfig::from_flags(cli.command.flags())?;
    let name = cli.command.name();
    match &cli.command {
        Command::Constants(_) => finish(name, &cfg, commands::constants(&cfg)?),
        Command::Verify(_) => finish(name, &cfg, commands::verify(&cfg)?),
        Command::Sweep(_) => finish(name, &cfg, commands::sweep(&cfg)?),
        Command::Discrete(_) => finish(name, &cfg, commands::discrete(&cfg)?),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let code = run(&cli).unwrap_or_else(|e| {
        eprintln!("error: {e}");
        e.exit_code()
    });
    if cli.command.flags().timing {
        eprintln!("wall time: {:.3} s", start.elapsed().as_secs_f64());
    }
    ExitCode::from(code)
}
