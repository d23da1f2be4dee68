mod args;
mod commands;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Remez(a) => commands::cmd_remez(a),
        Command::Rigidity(a) => commands::cmd_rigidity(a),
        Command::Omega(a) => commands::cmd_omega(a),
        Command::Family(a) => commands::cmd_family(a),
        Command::Verify(a) => commands::cmd_verify(a),
    };
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(commands::EXIT_FAILURE as u8)
        }
    }
}
