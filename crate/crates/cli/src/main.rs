// SPDX-License-Identifier: Apache-2.0

//! `edr`: reports, sweeps and checks for linear position measurements.
//!
//! Exit status is 0 on success, 1 when `verify` finds a closed form outside
//! its band, and 2 for usage errors and violated preconditions.

mod args;
mod commands;
mod render;

use std::process::ExitCode;

use clap::Parser;

use crate::args::Cli;
use crate::commands::Status;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli.command) {
        Ok(Status::Success) => ExitCode::SUCCESS,
        Ok(Status::VerificationFailed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
