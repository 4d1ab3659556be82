use std::io::Write;
use std::process;

use clap::Parser;
use hetcdc_cli::error::{CliError, ExitCode};
use hetcdc_cli::{run, Cli};

fn emit(cli: &Cli, body: &str) -> Result<(), CliError> {
    match &cli.out {
        Some(path) => std::fs::write(path, body)?,
        None => std::io::stdout().lock().write_all(body.as_bytes())?,
    }
    Ok(())
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { ExitCode::Parse } else { ExitCode::Ok };
            let _ = e.print();
            process::exit(code as i32);
        }
    };
    let code = match run(&cli) {
        Ok(outcome) => {
            for w in &outcome.warnings {
                eprintln!("warning: {w}");
            }
            match emit(&cli, &outcome.body) {
                Ok(()) => outcome.code,
                Err(e) => {
                    eprintln!("error: {e}");
                    e.exit_code()
                }
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    process::exit(code as i32);
}
