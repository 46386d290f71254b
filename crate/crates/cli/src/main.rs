//! `cantor-oe`: runs the verification suites and writes JSON reports.
//!
//! Exit status: 0 when every check passes, 1 when a check fails, 2 for
//! configuration or precondition errors.

mod commands;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Parser)]
#[command(name = "cantor-oe", version, about = "Orbit equivalence experiments on lattice actions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decompose A, realize it as a lattice bijection, spread it into the
    /// Gromov cocycle and recover A from the cocycle.
    Realize(RealizeArgs),
    /// Build the truncated space of maps for a seed and run the exhaustive checks.
    GromovCheck(GromovArgs),
    /// Checks for the matrix action on a product of p-adic odometers.
    Odometer(OdometerArgs),
    /// Compare the invariant of a composed morphism with the product of invariants.
    PsiFunctoriality(PsiArgs),
}

#[derive(Args, Clone, Debug)]
struct OutputArgs {
    /// Print the JSON report instead of a summary.
    #[arg(long)]
    json: bool,
    /// Also write the JSON report to this file.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Clone, Debug, Serialize)]
pub struct RealizeArgs {
    /// Rows separated by ';', entries by whitespace, e.g. "1 0.5; 0 1".
    #[arg(long)]
    pub matrix: String,
    #[arg(long, default_value_t = 1024)]
    pub n: u64,
    #[arg(long, default_value_t = 256)]
    pub samples: usize,
    /// Tolerance for |det A| = 1 and for the reconstruction of A.
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    #[serde(skip)]
    output: OutputArgs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Corruption {
    /// Overwrite one entry of the tabulated cocycle.
    AlphaTable,
    /// Drop one member of the slice.
    Slice,
}

#[derive(Args, Clone, Debug, Serialize)]
pub struct GromovArgs {
    /// The seed matrix.
    #[arg(long)]
    pub matrix: String,
    /// R: maps are tabulated on ball(R).
    #[arg(long, default_value_t = 4)]
    pub radius: u32,
    /// R_t: translates (g, λ) with ℓ(g) ≤ R_t; defaults to R.
    #[arg(long)]
    pub translate_radius: Option<u32>,
    /// W: orbit window.
    #[arg(long, default_value_t = 2)]
    pub window: u32,
    /// Prime of the odometer used to force freeness.
    #[arg(long, default_value_t = 2)]
    pub p: u32,
    #[arg(long, default_value_t = 4)]
    pub depth: u32,
    /// Odometer points used in the freeness check.
    #[arg(long, default_value_t = 8)]
    pub samples: usize,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Inject a corrupted input to exercise the checkers.
    #[arg(long, value_enum)]
    pub corrupt: Option<Corruption>,
    #[command(flatten)]
    #[serde(skip)]
    output: OutputArgs,
}

#[derive(Args, Clone, Debug, Serialize)]
pub struct OdometerArgs {
    /// Integer matrix with determinant ±1.
    #[arg(long)]
    pub matrix: String,
    #[arg(long, default_value_t = 3)]
    pub p: u32,
    #[arg(long, default_value_t = 4)]
    pub depth: u32,
    /// Random points for the equivariance check.
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    /// Ball radius for the equivariance check.
    #[arg(long, default_value_t = 3)]
    pub radius: u32,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    #[serde(skip)]
    output: OutputArgs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// Odometer automorphisms with constant cocycles (integer matrices).
    Constant,
    /// Gromov cocycles of realized lattice bijections.
    Realized,
}

#[derive(Args, Clone, Debug, Serialize)]
pub struct PsiArgs {
    /// Two matrices: first θ, then η.
    #[arg(long, num_args = 1, required = true)]
    pub matrix: Vec<String>,
    #[arg(long, value_enum, default_value_t = Mode::Constant)]
    pub mode: Mode,
    #[arg(long, default_value_t = 1024)]
    pub n: u64,
    #[arg(long, default_value_t = 256)]
    pub samples: usize,
    #[arg(long, default_value_t = 2)]
    pub p: u32,
    #[arg(long, default_value_t = 3)]
    pub depth: u32,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    #[serde(skip)]
    output: OutputArgs,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (output, result) = match cli.command {
        Command::Realize(a) => (a.output.clone(), commands::realize(&a)),
        Command::GromovCheck(a) => (a.output.clone(), commands::gromov_check(&a)),
        Command::Odometer(a) => (a.output.clone(), commands::odometer(&a)),
        Command::PsiFunctoriality(a) => (a.output.clone(), commands::psi_functoriality(&a)),
    };
    let report = match result {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    let json = match serde_json::to_string_pretty(&report) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: cannot serialize report: {e}");
            return ExitCode::from(2);
        }
    };
    if let Some(path) = &output.out {
        if let Err(e) = std::fs::write(path, format!("{json}\n")) {
            eprintln!("error: cannot write {}: {e}", path.display());
            return ExitCode::from(2);
        }
    }
    let text = if output.json { format!("{json}\n") } else { report.summary() };
    // a closed pipe (e.g. `| head`) is not an error
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
    if report.pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
