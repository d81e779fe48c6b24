use std::process::ExitCode;

use clap::Parser;
use flood_exposure_cli::{execute, threads_from_env, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result =
        threads_from_env().and_then(|threads| execute(cli, threads, &mut std::io::stdout().lock()));
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
