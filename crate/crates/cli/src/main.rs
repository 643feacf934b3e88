use std::process::ExitCode;

use clap::Parser;
use jnr_cli::commands::{run, Cli};
use jnr_cli::error::CliError;

/// Caps the global rayon pool when `JNR_THREADS` is set.
fn configure_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("JNR_THREADS") else {
        return Ok(());
    };
    let n: usize = v.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
        CliError::input(format!("JNR_THREADS must be a positive integer, got {v:?}"))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::input(e.to_string()))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprintln!(
                "{}",
                CliError::input(e.to_string().trim_end()).to_json_line()
            );
            return ExitCode::from(2);
        }
    };
    match configure_threads().and_then(|_| run(cli)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json_line());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
