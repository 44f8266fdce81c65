// SPDX-License-Identifier: Apache-2.0

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use edr_core::{Constants, FamilyKind, GaussianState};

#[derive(Debug, Parser)]
#[command(name = "edr", version, about = "Error-disturbance calculus for linear position measurements")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Report one member of a named optimal family.
    Family {
        #[arg(long, value_enum)]
        kind: Kind,
        #[arg(long)]
        mu: f64,
        #[command(flatten)]
        psi: PsiArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Solve for the couplings and time of an optimal measurement.
    Solve {
        #[arg(long)]
        mu: f64,
        #[arg(long, allow_hyphen_values = true)]
        gamma: f64,
        /// Discriminant `det S = −(γ² + αβ)`.
        #[arg(long = "D", alias = "discriminant", allow_hyphen_values = true)]
        discriminant: f64,
        #[command(flatten)]
        psi: PsiArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Tabulate a family over a grid of error parameters.
    Sweep {
        #[arg(long, value_enum)]
        kind: Kind,
        /// Explicit comma-separated μ values; overrides `--points`.
        #[arg(long, value_delimiter = ',')]
        mu: Vec<f64>,
        /// Number of equally spaced interior points `i/(points+1)`.
        #[arg(long, default_value_t = 99)]
        points: usize,
        #[command(flatten)]
        psi: PsiArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Posterior states for meter readings, or the state conditioned on an interval.
    Posterior {
        #[arg(long, value_enum)]
        kind: Kind,
        #[arg(long)]
        mu: f64,
        /// Comma-separated readings.
        #[arg(
            long,
            value_delimiter = ',',
            allow_hyphen_values = true,
            conflicts_with = "interval",
            required_unless_present = "interval"
        )]
        y: Vec<f64>,
        /// Reading interval `lo:hi`; either end may be `-inf`/`inf`.
        #[arg(long, allow_hyphen_values = true)]
        interval: Option<String>,
        #[command(flatten)]
        psi: PsiArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Run the Monte Carlo oracle suite against every closed form.
    Verify {
        #[arg(long, default_value_t = 0x5eed)]
        seed: u64,
        #[arg(long, default_value_t = 1_000_000)]
        n: usize,
        /// Number of random non-optimal measurements.
        #[arg(long, default_value_t = 100)]
        random: usize,
        /// Scale every analytic ε by 1 + TAMPER (mutation check).
        #[arg(long, hide = true, allow_hyphen_values = true)]
        tamper: Option<f64>,
        #[command(flatten)]
        psi: PsiArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    #[value(name = "A", alias = "a")]
    A,
    #[value(name = "B", alias = "b")]
    B,
    #[value(name = "C", alias = "c")]
    C,
}

impl From<Kind> for FamilyKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::A => FamilyKind::A,
            Kind::B => FamilyKind::B,
            Kind::C => FamilyKind::C,
        }
    }
}

/// The system state: a minimum uncertainty packet.
#[derive(Debug, Clone, Args)]
pub struct PsiArgs {
    #[arg(long, default_value_t = 1.0)]
    pub hbar: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub q1: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub p1: f64,
    #[arg(long, default_value_t = 1.0)]
    pub sigma1: f64,
}

impl PsiArgs {
    pub fn resolve(&self) -> edr_core::Result<(Constants, GaussianState)> {
        let consts = Constants::new(self.hbar)?;
        let psi = GaussianState::minimum_uncertainty(self.q1, self.p1, self.sigma1, &consts)?;
        Ok((consts, psi))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Output format; each command has its own default.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Write to this file instead of stdout. Relative paths resolve against
    /// `$EDR_OUT_DIR` when it is set.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}
