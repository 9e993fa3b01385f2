// SPDX-License-Identifier: Apache-2.0

//! `repvol` — command-line front end for the volume toolkit.
//!
//! Exit codes: 0 on success, 2 on input or parse errors, 3 on numerical
//! failure (non-convergence, degenerate classification). Every failure
//! prints one line starting with `error:`.

mod commands;
mod output;

use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use output::Format;

#[derive(Debug, Parser)]
#[command(name = "repvol", version, about = "Volumes of hyperbolic representations: cocycles, normal forms, Dehn filling")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Global {
    /// Numerical tolerance.
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tol: f64,
    /// Iteration cap for iterative solvers.
    #[arg(long, global = true, default_value_t = 100)]
    pub max_iter: usize,
    /// Seed for commands that draw random samples.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Significant digits for real outputs.
    #[arg(long, global = true, default_value_t = 12)]
    pub digits: usize,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fundamental cycle of Z^n as an exact chain.
    FundCycle {
        n: usize,
        /// Largest dimension allowed before refusing.
        #[arg(long, default_value_t = repvol_core::lattice::DEFAULT_DIMENSION_CAP)]
        cap: usize,
    },
    /// Pairs a cochain with a chain read from JSON.
    Pairing {
        /// Chain JSON file (or inline JSON).
        #[arg(long)]
        chain: String,
        /// Pull back the rotation cocycle along this homomorphism instead of
        /// using the Euclidean volume cocycle.
        #[arg(long)]
        hom: Option<String>,
    },
    /// Higher rotation number of a homomorphism Z^(2m-1) → O(2)^m.
    Rotnum {
        #[arg(long)]
        hom: String,
        /// Largest number of circle factors allowed.
        #[arg(long, default_value_t = repvol_core::circle::DEFAULT_FACTOR_CAP)]
        cap: usize,
    },
    /// Congruence audit of a normalized volume against cusp data.
    Audit {
        /// Candidate normalized volume as p/q.
        #[arg(long)]
        vol: String,
        /// Cusp homomorphism (repeatable).
        #[arg(long = "hom")]
        homs: Vec<String>,
        /// Number of circle factors; inferred from the homomorphisms if omitted.
        #[arg(long)]
        m: Option<usize>,
        /// Bieberbach divisor B.
        #[arg(long)]
        divisor: Option<u64>,
    },
    /// Elliptic, parabolic or hyperbolic type of a Lorentz matrix.
    Classify {
        /// Matrix JSON file (or inline JSON).
        #[arg(long)]
        matrix: String,
    },
    /// Factors an element of P as m(U)·a(t)·n(x).
    DecomposeP {
        #[arg(long)]
        matrix: String,
    },
    /// Signed area of a triangle in H^2 (three points).
    Area {
        /// Points JSON file (or inline JSON).
        #[arg(long)]
        points: String,
    },
    /// Volume of an ideal tetrahedron from a shape or from four ideal points.
    IdealVol {
        /// Shape parameter as re,im.
        #[arg(long, allow_hyphen_values = true, conflicts_with = "points")]
        z: Option<String>,
        #[arg(long)]
        points: Option<String>,
    },
    /// Gluing equations, Dehn filling and filling paths.
    Dehn {
        #[command(subcommand)]
        action: DehnAction,
    },
    /// Volume of a doubled manifold with ℓ of k pieces folded.
    Double {
        /// Base volume; defaults to the complete figure-eight volume.
        #[arg(long)]
        base: Option<f64>,
        #[arg(long)]
        k: u64,
        #[arg(long)]
        l: u64,
    },
    /// Fundamental domains for Z acting on R.
    Transfer {
        #[command(subcommand)]
        action: TransferAction,
    },
}

#[derive(Debug, Args)]
pub struct SystemArgs {
    /// Gluing system JSON; defaults to the bundled figure-eight system.
    #[arg(long)]
    pub system: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum DehnAction {
    /// Complete hyperbolic structure.
    Solve {
        #[command(flatten)]
        system: SystemArgs,
    },
    /// Filled structure along a slope.
    Fill {
        #[command(flatten)]
        system: SystemArgs,
        /// Filling slope p,q.
        #[arg(long, allow_hyphen_values = true)]
        slope: String,
    },
    /// Volumes along the path from the complete structure to the filling.
    Path {
        #[command(flatten)]
        system: SystemArgs,
        #[arg(long, allow_hyphen_values = true)]
        slope: String,
        #[arg(long, default_value_t = 100)]
        steps: usize,
    },
}

#[derive(Debug, Args)]
pub struct DomainArgs {
    /// Domain JSON file, `standard`, or `bad:N`.
    #[arg(long, default_value = "standard")]
    pub domain: String,
}

#[derive(Debug, Subcommand)]
pub enum TransferAction {
    /// Counts translates k + D, |k| ≤ N, meeting K = [a, b].
    Count {
        #[command(flatten)]
        domain: DomainArgs,
        #[arg(long = "K", allow_hyphen_values = true, default_value = "0,1")]
        k_interval: String,
        #[arg(long = "N")]
        n: u64,
    },
    /// Transfers the capped distance cochain and reports the quadrature.
    Demo {
        #[command(flatten)]
        domain: DomainArgs,
        /// Comma-separated rational inputs; random (by --seed) if omitted.
        #[arg(long, allow_hyphen_values = true)]
        inputs: Option<String>,
        #[arg(long, default_value_t = 64)]
        samples: usize,
        /// Use the plain midpoint rule with an error bound.
        #[arg(long)]
        uniform: bool,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            use clap::error::ErrorKind;
            if matches!(err.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{err}");
                return ExitCode::SUCCESS;
            }
            let rendered = err.to_string();
            let first = rendered.lines().next().unwrap_or("invalid arguments");
            let msg = first.strip_prefix("error: ").unwrap_or(first);
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    match commands::run(&cli) {
        Ok(value) => {
            let mut out = std::io::stdout().lock();
            // a closed pipe downstream is not our failure
            let _ = writeln!(out, "{}", output::render(&value, cli.global.format));
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("error: {}", err.message().replace('\n', " "));
            ExitCode::from(err.exit_code())
        }
    }
}
