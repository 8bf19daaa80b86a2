//! `bh`: command-line front end.
//!
//! Exit codes: 0 success, 2 invalid input, 3 numerical failure or failed check.

mod commands;
mod config;
mod svg;

use std::process::ExitCode;

use clap::Parser;

use config::{Cli, Command, Settings};

#[derive(Debug)]
pub enum CliError {
    Validation(String),
    Numerical(String),
}

impl From<bh_core::error::Error> for CliError {
    fn from(e: bh_core::error::Error) -> Self {
        if e.is_validation() {
            CliError::Validation(e.to_string())
        } else {
            CliError::Numerical(e.to_string())
        }
    }
}

const EXIT_VALIDATION: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;

fn run(cli: &Cli) -> Result<bool, CliError> {
    let settings = Settings::resolve(&cli.flags)?;
    if cli.flags.show_config {
        print!("{}", settings.to_toml());
        return Ok(true);
    }
    let out = match cli.command {
        Command::Analyze => commands::analyze(&settings)?,
        Command::Portrait => commands::portrait(&settings)?,
        Command::Wave => commands::wave(&settings)?,
        Command::PdeCheck => commands::pde_check(&settings)?,
        Command::Sweep => commands::sweep(&settings)?,
    };
    match &settings.out {
        Some(dir) => {
            let io = |e: std::io::Error| CliError::Validation(format!("cannot write to {}: {e}", dir.display()));
            std::fs::create_dir_all(dir).map_err(io)?;
            for (name, body) in &out.files {
                std::fs::write(dir.join(name), body).map_err(io)?;
            }
            println!("{}", out.summary);
        }
        None => {
            print!("{}", out.stdout);
            eprintln!("{}", out.summary);
        }
    }
    Ok(out.ok)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_NUMERICAL),
        Err(CliError::Validation(msg)) => {
            eprintln!("bh {}: {msg}", cli.command.name());
            ExitCode::from(EXIT_VALIDATION)
        }
        Err(CliError::Numerical(msg)) => {
            eprintln!("bh {}: {msg}", cli.command.name());
            ExitCode::from(EXIT_NUMERICAL)
        }
    }
}
