//! The `flood-exposure` command line: `validate`, `run` and `compare`.

pub mod commands;
pub mod config;
pub mod error;
pub mod outputs;

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub use commands::Scenario;
pub use config::{RunConfig, Settings};
pub use error::CliError;

/// Environment variable capping the worker count; 0 or unset means one
/// worker per core.
pub const THREADS_ENV: &str = "FLOOD_EXPOSURE_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "flood-exposure",
    version,
    about = "Population exposure around flooded industrial and toxic facilities"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, clap::Args)]
pub struct Common {
    /// TOML configuration file. Every key can also be passed as a flag.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub settings: Settings,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Read every input and report row counts and errors.
    Validate(Common),
    /// Run one flood scenario and write exposure tables.
    Run {
        #[arg(long, value_enum)]
        scenario: Scenario,
        #[command(flatten)]
        common: Common,
    },
    /// Run both scenarios and write the change between them.
    Compare(Common),
}

/// Worker count from [`THREADS_ENV`].
pub fn threads_from_env() -> Result<usize, CliError> {
    match std::env::var(THREADS_ENV) {
        Ok(v) => v.trim().parse().map_err(|_| {
            CliError::Config(format!(
                "{THREADS_ENV} must be a non-negative integer, got {v:?}"
            ))
        }),
        Err(_) => Ok(0),
    }
}

/// Runs a parsed command on a pool of `threads` workers (0 = auto) and
/// returns the exit code.
pub fn execute(cli: Cli, threads: usize, out: &mut dyn Write) -> Result<u8, CliError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Config(format!("cannot start worker pool: {e}")))?;
    // Messages are buffered so the pool never touches a non-Send writer.
    let mut buffer = Vec::new();
    let result = pool.install(|| dispatch(cli, &mut buffer));
    out.write_all(&buffer)
        .map_err(|e| CliError::io("<stdout>", e))?;
    result
}

fn dispatch(cli: Cli, out: &mut dyn Write) -> Result<u8, CliError> {
    let load = |c: Common| RunConfig::load(c.config.as_deref(), c.settings);
    let written = match cli.command {
        Command::Validate(c) => return commands::validate(&load(c)?, out),
        Command::Run { scenario, common } => commands::run(&load(common)?, scenario)?,
        Command::Compare(c) => commands::compare(&load(c)?)?,
    };
    for path in written {
        writeln!(out, "wrote {}", path.display()).map_err(|e| CliError::io("<stdout>", e))?;
    }
    Ok(0)
}
