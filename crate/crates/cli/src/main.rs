//! `spinbo`: drive the spin Benjamin-Ono laboratory from the shell.
//!
//! Five subcommands: `simulate` integrates the flow and writes a run
//! directory, `verify` runs seeded residual campaigns over the operator
//! identities, `spectrum` and `invariants` interrogate stored fields or
//! runs, and `gen` writes deterministic initial data.
//!
//! Exit codes: 0 success, 1 a numerical gate was violated (hard limit
//! tripped, residual tolerance exceeded), 2 invalid input.

mod commands;

use clap::{Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "spinbo", version, about = "Pseudospectral laboratory for the spin Benjamin-Ono equation on the torus")]
struct Cli {
    /// Configuration file (TOML); built-in defaults apply when omitted
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Override one configuration entry, e.g. --set dt=5e-4 (repeatable)
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,

    /// Random seed; takes precedence over the configured seed
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Output directory; takes precedence over the configured one
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,

    /// Suppress warnings and progress lines
    #[arg(long, global = true)]
    quiet: bool,

    /// Print the effective configuration as TOML and exit
    #[arg(long, global = true)]
    print_config: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate the flow; write snapshots, invariants and a manifest
    Simulate,

    /// Seeded residual campaigns for the operator identities
    Verify {
        /// Which identity to test
        #[arg(long, value_enum)]
        kind: VerifyKind,
        /// Random trials per (d, bandwidth) cell
        #[arg(long, default_value_t = 100)]
        trials: u64,
        /// Matrix dimensions to sweep
        #[arg(long, value_delimiter = ',', default_value = "1,2,3")]
        dims: Vec<usize>,
        /// Coefficient bandwidths to sweep
        #[arg(long, value_delimiter = ',', default_value = "1,2,3,4,5,6")]
        bandwidths: Vec<i64>,
    },

    /// Eigenvalues of the Lax compression for a field file or a run directory
    Spectrum {
        /// Field JSON file, or a run directory containing run_manifest.json
        input: PathBuf,
        /// Compression cutoff; defaults to the run's (or config's) hardy_modes
        #[arg(long, value_name = "N")]
        hardy_modes: Option<usize>,
    },

    /// Conserved quantities of a field file or along a stored run
    Invariants {
        /// Field JSON file, or a run directory containing run_manifest.json
        input: PathBuf,
        /// Highest energy order to evaluate
        #[arg(long, value_name = "K")]
        energy_orders: Option<usize>,
        /// Highest matrix-invariant order (series starts at -1)
        #[arg(long, value_name = "K", allow_hyphen_values = true)]
        matrix_orders: Option<i64>,
    },

    /// Write a deterministic initial-data field file
    Gen {
        #[arg(long, value_enum)]
        preset: Preset,
        /// Matrix dimension
        #[arg(long, default_value_t = 2)]
        d: usize,
        #[arg(long, default_value_t = 0.5)]
        amplitude: f64,
        /// Exponential decay rate of the coefficient norms (decay preset)
        #[arg(long, default_value_t = 0.5)]
        rate: f64,
        /// Highest excited mode (decay preset)
        #[arg(long, default_value_t = 3)]
        bandwidth: i64,
        /// Output file; defaults to field.json inside the output directory
        #[arg(long, value_name = "PATH")]
        path: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum VerifyKind {
    /// Toeplitz factorization defect against its closed form
    Lemma,
    /// Vanishing combination of anticommutator and commutator symbols
    Critical,
    /// Commutator of the Lax pair against the flow's right-hand side
    LaxStatic,
    /// Closed forms of the low-order invariants against operator definitions
    Explicit,
    /// Trace of each matrix invariant against the scalar energy
    Trace,
}

impl VerifyKind {
    fn name(self) -> &'static str {
        match self {
            VerifyKind::Lemma => "lemma",
            VerifyKind::Critical => "critical",
            VerifyKind::LaxStatic => "lax-static",
            VerifyKind::Explicit => "explicit",
            VerifyKind::Trace => "trace",
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Preset {
    /// `2 amplitude cos(x) · I`
    Cosine,
    /// Random Hermitian data with exact exponential coefficient decay
    Decay,
}

/// A failed command, tagged with the exit code it maps to.
enum Failure {
    /// Numerical gate violated: exit 1
    Violation(String),
    /// Bad input or environment: exit 2
    Invalid(String),
}

impl Failure {
    fn from_core(e: spinbo_core::Error) -> Failure {
        use spinbo_core::Error;
        match e {
            Error::HardLimit { .. } | Error::BlowUp { .. } => Failure::Violation(e.to_string()),
            _ => Failure::Invalid(e.to_string()),
        }
    }
}

fn main() -> ExitCode {
    match commands::run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Violation(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Invalid(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
