//! `fusionc`: batch verification of skeletal fusion-category data stored in `.fc` files.
//!
//! Exit codes: 0 when the check passes, 1 on a mathematical violation (the report says
//! which instance), 2 on unreadable input or a usage error.

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use report::Emit;

#[derive(Parser)]
#[command(name = "fusionc", version, about = "Exact checks for skeletal fusion categories over Q(ζ12)")]
struct Cli {
    /// Report format.
    #[arg(long, value_enum, default_value = "text", global = true)]
    emit: Emit,
    /// Worker threads for parallel checks (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the unit, duality, associativity and rigidity axioms of the fusion rules.
    ValidateRing { file: PathBuf },
    /// Check that unit-involving associators are identities.
    CheckTriangle { file: PathBuf },
    /// Check every pentagon instance exactly.
    CheckPentagon { file: PathBuf },
    /// Classify the associator solutions on the rank-3 ring from scratch.
    SolvePentagon {
        /// Directory for the solutions as .fc files.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Apply ζ ↦ ζ^k to every associator entry, or list invariants of the whole orbit.
    GaloisOrbit {
        file: PathBuf,
        #[arg(long, value_parser = parse_exponent)]
        k: Option<i64>,
        /// Write the conjugated file here instead of into the report.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve the hexagon equations for every possible braiding.
    CheckHexagon { file: PathBuf },
    /// Replay the five-instance derivation showing no braiding exists.
    ProveNoBraiding { file: PathBuf },
    /// Bending matrix, B³, and the pivotal structures.
    Pivotal { file: PathBuf },
    /// Left and right traces, quantum dimensions and Frobenius-Schur indicators.
    Traces { file: PathBuf },
    /// Evaluate both snake identities for every strand.
    SnakeCheck { file: PathBuf },
    /// Brute-force fusion rings of a given rank, up to relabeling.
    EnumerateRings {
        #[arg(long)]
        rank: usize,
        #[arg(long, default_value_t = 3)]
        max_entry: u32,
        /// Impose the rank-4 lemma constraints (objects 1, w, v, v*, graded).
        #[arg(long)]
        lemma: bool,
    },
}

fn parse_exponent(s: &str) -> Result<i64, String> {
    match s.parse::<i64>() {
        Ok(k @ (1 | 5 | 7 | 11)) => Ok(k),
        _ => Err("k must be one of 1, 5, 7, 11".into()),
    }
}

fn run(cli: &Cli) -> Result<report::Report, commands::CliError> {
    use Command::*;
    match &cli.command {
        ValidateRing { file } => commands::validate_ring(file),
        CheckTriangle { file } => commands::check_triangle(file),
        CheckPentagon { file } => commands::check_pentagon(file),
        SolvePentagon { out } => commands::solve_pentagon(out.as_deref()),
        GaloisOrbit { file, k, out } => commands::galois_orbit(file, *k, out.as_deref()),
        CheckHexagon { file } => commands::check_hexagon(file),
        ProveNoBraiding { file } => commands::prove_braiding_absent(file),
        Pivotal { file } => commands::pivotal(file),
        Traces { file } => commands::traces(file),
        SnakeCheck { file } => commands::snake(file),
        EnumerateRings { rank, max_entry, lemma } => commands::enumerate(*rank, *max_entry, *lemma),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.jobs {
        if n == 0 {
            eprintln!("error: --jobs must be positive");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(&cli) {
        Ok(rep) => {
            print!("{}", rep.render(cli.emit));
            ExitCode::from(rep.outcome.exit_code())
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
