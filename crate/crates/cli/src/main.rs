//! Command-line harness: run any solver on a Matrix Market problem or
//! a synthetic instance, with optional split preconditioning and dense
//! oracle verification, emitting a per-iteration CSV and a summary
//! JSON.
//!
//! Exit codes: 0 clean convergence or iteration-limit stop, 2 solver
//! breakdown, 3 I/O, parse, or configuration error.

mod compare;
mod instance;
mod run;

use clap::{Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SolverArg {
    Cg,
    Cgls,
    Lsqr,
    Cgne,
    Craig,
}

impl SolverArg {
    pub fn name(&self) -> &'static str {
        match self {
            SolverArg::Cg => "cg",
            SolverArg::Cgls => "cgls",
            SolverArg::Lsqr => "lsqr",
            SolverArg::Cgne => "cgne",
            SolverArg::Craig => "craig",
        }
    }

    pub fn is_least_norm(&self) -> bool {
        matches!(self, SolverArg::Cgne | SolverArg::Craig)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PrecondArg {
    None,
    Jacobi,
    Ic0,
}

impl PrecondArg {
    pub fn name(&self) -> &'static str {
        match self {
            PrecondArg::None => "none",
            PrecondArg::Jacobi => "jacobi",
            PrecondArg::Ic0 => "ic0",
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "krylest", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, clap::Args)]
pub struct InstanceArgs {
    /// Matrix Market coordinate file with the matrix A.
    #[arg(long, conflicts_with = "synthetic")]
    pub matrix: Option<PathBuf>,
    /// Synthetic instance: identity:N, diag:d1,d2,..., or
    /// svd:m,n,cond,seed.
    #[arg(long)]
    pub synthetic: Option<String>,
    /// Right-hand side: `bundled` (loads `<matrix>_b.mtx` next to the
    /// matrix file) or `generated:<seed>` (the alternating-signs
    /// recipe, plus scaled Gaussian noise for least-squares solvers).
    #[arg(long, default_value = "generated:0")]
    pub rhs: String,
}

#[derive(Debug, Clone, clap::Args)]
pub struct SolveArgs {
    /// Estimator relative accuracy target in (0, 1).
    #[arg(long, default_value_t = 0.25)]
    pub tau: f64,
    /// Estimator safety parameter.
    #[arg(long, default_value_t = 1e-4)]
    pub tol_est: f64,
    /// Stopping tolerance alpha (estimate <= alpha ||A|| ||x_k|| + beta ||b||).
    #[arg(long, default_value_t = 0.0)]
    pub alpha: f64,
    /// Stopping tolerance beta.
    #[arg(long, default_value_t = 0.0)]
    pub beta: f64,
    #[arg(long, default_value_t = 1000)]
    pub max_iter: usize,
    /// Record the per-iteration local-orthogonality scalar.
    #[arg(long)]
    pub local_orth: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one solver and write the per-iteration CSV + summary JSON.
    Run {
        #[arg(long, value_enum)]
        solver: SolverArg,
        #[arg(long, value_enum, default_value = "none")]
        precond: PrecondArg,
        #[command(flatten)]
        instance: InstanceArgs,
        #[command(flatten)]
        solve: SolveArgs,
        /// Compute the dense ground truth and fill the oracle columns.
        #[arg(long)]
        oracle: bool,
        /// CSV output path (default: $KRYLEST_OUT_DIR/run.csv or ./run.csv).
        #[arg(long)]
        csv: Option<PathBuf>,
        /// JSON summary path (default: $KRYLEST_OUT_DIR/run.json or ./run.json).
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Run two solver configurations on the same instance and report
    /// their divergence (max iterate distance, estimate ratios).
    Compare {
        #[arg(long, value_enum)]
        solver_a: SolverArg,
        #[arg(long, value_enum)]
        solver_b: SolverArg,
        #[arg(long, value_enum, default_value = "none")]
        precond_a: PrecondArg,
        #[arg(long, value_enum, default_value = "none")]
        precond_b: PrecondArg,
        #[command(flatten)]
        instance: InstanceArgs,
        #[command(flatten)]
        solve: SolveArgs,
    },
}

fn main() -> ExitCode {
    // Remap clap's usage-error exit (2) to 3: this tool reserves 2 for
    // solver breakdown.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Run {
            solver,
            precond,
            instance,
            solve,
            oracle,
            csv,
            json,
        } => run::run(solver, precond, &instance, &solve, oracle, csv, json),
        Command::Compare {
            solver_a,
            solver_b,
            precond_a,
            precond_b,
            instance,
            solve,
        } => compare::compare(solver_a, solver_b, precond_a, precond_b, &instance, &solve),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}

fn exit_code_for(err: &krylest::Error) -> u8 {
    match err {
        krylest::Error::Breakdown { .. } | krylest::Error::NotSpd { .. } => 2,
        _ => 3,
    }
}
