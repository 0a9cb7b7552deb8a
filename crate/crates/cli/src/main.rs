//! `qgt`: evaluate the mixed-state quantum geometric tensor of thermal states.
//!
//! Exit codes: 0 success, 1 a `verify` invariant failed, 2 error (bad input,
//! degenerate point, I/O), 3 partial sweep with failures logged to `<out>.log`.

mod args;
mod cmd;
mod eval;
mod model;
mod output;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use cmd::Status;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Point(a) => cmd::point::run(a),
        Command::Sweep(a) => cmd::sweep::run(a),
        Command::Phase(a) => cmd::phase::run(a),
        Command::Bcs(a) => cmd::bcs::run(a),
        Command::Verify(a) => cmd::verify::run(a),
    };
    match result {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::Failed) => ExitCode::from(1),
        Ok(Status::Partial) => {
            eprintln!("qgt: some points failed; see the log");
            ExitCode::from(3)
        }
        Err(e) => {
            eprintln!("qgt: error: {e:#}");
            ExitCode::from(2)
        }
    }
}
