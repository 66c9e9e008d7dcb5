//! Solver execution and report emission.

use crate::instance::{resolve, ResolvedInstance};
use crate::{InstanceArgs, PrecondArg, SolveArgs, SolverArg};
use krylest::oracle::{oracle_report, IdealDelay, NormKind, OracleReport};
use krylest::{
    build_ic0, build_jacobi, cg_solve, cgls_solve, cgne_solve, craig_solve, lsqr_solve,
    pcgls_solve, pcgne_solve, pcraig_solve, plsqr_solve, Error, GramSide, Result, SolverConfig,
    SolverTrace, Termination,
};
use serde::Serialize;
use std::io::Write;
use std::path::{Path, PathBuf};

pub const CSV_HEADER: &str =
    "k,res_norm,delta,accepted_ell,estimate,true_err_sq,ideal_delay,chosen_delay,local_orth";

pub fn solver_config(solve: &SolveArgs, oracle: bool) -> SolverConfig {
    SolverConfig {
        max_iter: solve.max_iter,
        tau: solve.tau,
        tol_est: solve.tol_est,
        stop_alpha: solve.alpha,
        stop_beta: solve.beta,
        record_local_orthogonality: solve.local_orth,
        record_iterates: oracle,
    }
}

pub fn norm_kind_for(solver: SolverArg) -> NormKind {
    match solver {
        SolverArg::Cg => NormKind::EnergyA,
        SolverArg::Cgls | SolverArg::Lsqr => NormKind::EnergyAtA,
        SolverArg::Cgne | SolverArg::Craig => NormKind::Euclidean,
    }
}

pub fn execute(
    solver: SolverArg,
    precond: PrecondArg,
    inst: &ResolvedInstance,
    cfg: &SolverConfig,
) -> Result<SolverTrace> {
    let a = &inst.matrix;
    let b = &inst.rhs;
    let trace = match (solver, precond) {
        (SolverArg::Cg, PrecondArg::None) => cg_solve(a, b, None, cfg)?.1,
        (SolverArg::Cg, _) => {
            return Err(Error::InvalidParam(
                "preconditioning is not available for cg".into(),
            ))
        }
        (SolverArg::Cgls, PrecondArg::None) => cgls_solve(a, b, None, cfg)?.1,
        (SolverArg::Lsqr, PrecondArg::None) => lsqr_solve(a, b, cfg)?.1,
        (SolverArg::Cgne, PrecondArg::None) => cgne_solve(a, b, None, cfg)?.1,
        (SolverArg::Craig, PrecondArg::None) => craig_solve(a, b, cfg, false)?.2,
        (solver, precond) => {
            let side = if solver.is_least_norm() {
                GramSide::Rows
            } else {
                GramSide::Cols
            };
            let m = match precond {
                PrecondArg::Jacobi => build_jacobi(a, side)?,
                PrecondArg::Ic0 => build_ic0(a, side)?,
                PrecondArg::None => unreachable!(),
            };
            match solver {
                SolverArg::Cgls => pcgls_solve(a, b, None, &m, cfg)?.1,
                SolverArg::Lsqr => plsqr_solve(a, b, &m, cfg)?.1,
                SolverArg::Cgne => pcgne_solve(a, b, None, &m, cfg)?.1,
                SolverArg::Craig => pcraig_solve(a, b, &m, cfg)?.1,
                SolverArg::Cg => unreachable!(),
            }
        }
    };
    Ok(trace)
}

/// 17-significant-digit float formatting, round-trip safe.
fn fmt_f64(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else if v.is_nan() {
        "nan".into()
    } else if v > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

pub fn write_csv(
    path: &Path,
    trace: &SolverTrace,
    report: Option<&OracleReport>,
) -> Result<()> {
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(out, "{CSV_HEADER}")?;
    for j in 0..trace.iterations {
        let res = fmt_f64(trace.res_norms[j]);
        let delta = fmt_f64(trace.deltas[j]);
        let (ell, estimate, chosen) = match trace.estimate_for(j) {
            Some(ev) => (
                ev.ell.to_string(),
                fmt_f64(ev.estimate),
                ev.delay.to_string(),
            ),
            None => (String::new(), String::new(), String::new()),
        };
        let (true_err, ideal) = match report {
            Some(r) => (
                fmt_f64(r.true_errors[j]),
                match r.ideal_delays[j] {
                    IdealDelay::Finite(d) | IdealDelay::Unbounded(d) => d.to_string(),
                },
            ),
            None => (String::new(), String::new()),
        };
        let lorth = trace
            .local_orth
            .get(j)
            .copied()
            .flatten()
            .map(fmt_f64)
            .unwrap_or_default();
        writeln!(
            out,
            "{j},{res},{delta},{ell},{estimate},{true_err},{ideal},{chosen},{lorth}"
        )?;
    }
    out.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct MatrixSummary {
    source: String,
    rows: usize,
    cols: usize,
    nnz: usize,
}

#[derive(Serialize)]
struct RhsSummary {
    kind: &'static str,
    source: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
}

#[derive(Serialize)]
struct ConfigSummary {
    tau: f64,
    tol_est: f64,
    alpha: f64,
    beta: f64,
    max_iter: usize,
}

#[derive(Serialize)]
struct OracleSummary {
    r_true_norm: f64,
    plateau_index: usize,
    initial_true_err_sq: f64,
    final_true_err_sq: f64,
    /// Accepted estimates above (1 + 1e-6) x true squared error,
    /// counted before the plateau.
    lower_bound_violations: usize,
    /// Accepted estimates missing the tau relative-accuracy target,
    /// counted before the plateau.
    accuracy_misses: usize,
    events_before_plateau: usize,
}

#[derive(Serialize)]
struct RunSummary {
    solver: &'static str,
    preconditioner: &'static str,
    matrix: MatrixSummary,
    rhs: RhsSummary,
    config: ConfigSummary,
    iterations: usize,
    termination: String,
    events: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    final_estimate: Option<f64>,
    /// Upper-bound companion of the final estimate, estimate / (1 - tau).
    #[serde(skip_serializing_if = "Option::is_none")]
    final_upper_bound: Option<f64>,
    /// Final estimate relative to the accumulated total Delta_{0:K-1},
    /// which (with x_0 = 0) estimates the squared norm of the solution
    /// itself, giving the relative-error companion quantity.
    #[serde(skip_serializing_if = "Option::is_none")]
    final_relative_estimate: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    final_res_norm: Option<f64>,
    clamped_deltas: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    oracle: Option<OracleSummary>,
}

fn termination_label(t: &Termination) -> String {
    match t {
        Termination::MaxIter => "max_iter".into(),
        Termination::ResidualZero => "residual_zero".into(),
        Termination::LuckyBreakdown => "lucky_breakdown".into(),
        Termination::EstimateStop { ell, k } => format!("estimate_stop(ell={ell},k={k})"),
    }
}

fn oracle_summary(trace: &SolverTrace, report: &OracleReport, tau: f64) -> OracleSummary {
    let mut lower_bound_violations = 0;
    let mut accuracy_misses = 0;
    let mut events_before_plateau = 0;
    for ev in &trace.events {
        if ev.ell >= report.plateau_index {
            continue;
        }
        events_before_plateau += 1;
        let true_sq = report.true_errors[ev.ell];
        if ev.estimate > (1.0 + 1e-6) * true_sq {
            lower_bound_violations += 1;
        }
        if true_sq > 0.0 && (true_sq - ev.estimate) / true_sq > tau {
            accuracy_misses += 1;
        }
    }
    OracleSummary {
        r_true_norm: report.r_true_norm,
        plateau_index: report.plateau_index,
        initial_true_err_sq: report.true_errors.first().copied().unwrap_or(0.0),
        final_true_err_sq: report.true_errors.last().copied().unwrap_or(0.0),
        lower_bound_violations,
        accuracy_misses,
        events_before_plateau,
    }
}

fn default_out(name: &str) -> PathBuf {
    let dir = std::env::var_os("KRYLEST_OUT_DIR")
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("."));
    dir.join(name)
}

pub fn run(
    solver: SolverArg,
    precond: PrecondArg,
    instance: &InstanceArgs,
    solve: &SolveArgs,
    oracle: bool,
    csv: Option<PathBuf>,
    json: Option<PathBuf>,
) -> Result<()> {
    let inst = resolve(instance, solver)?;
    let cfg = solver_config(solve, oracle);
    let trace = execute(solver, precond, &inst, &cfg)?;

    let report = if oracle {
        Some(oracle_report(
            &inst.matrix,
            &inst.rhs,
            &trace,
            norm_kind_for(solver),
            solve.tau,
        )?)
    } else {
        None
    };

    let csv_path = csv.unwrap_or_else(|| default_out("run.csv"));
    let json_path = json.unwrap_or_else(|| default_out("run.json"));
    write_csv(&csv_path, &trace, report.as_ref())?;

    let summary = RunSummary {
        solver: solver.name(),
        preconditioner: precond.name(),
        matrix: MatrixSummary {
            source: inst.matrix_source.clone(),
            rows: inst.matrix.rows(),
            cols: inst.matrix.cols(),
            nnz: inst.matrix.nnz(),
        },
        rhs: RhsSummary {
            kind: match inst.kind {
                krylest::ProblemKind::LeastSquares => "least_squares",
                krylest::ProblemKind::LeastNorm => "least_norm",
            },
            source: inst.rhs_source.clone(),
            seed: inst.seed,
        },
        config: ConfigSummary {
            tau: solve.tau,
            tol_est: solve.tol_est,
            alpha: solve.alpha,
            beta: solve.beta,
            max_iter: solve.max_iter,
        },
        iterations: trace.iterations,
        termination: termination_label(&trace.termination),
        events: trace.events.len(),
        final_estimate: trace.events.last().map(|e| e.estimate),
        final_upper_bound: trace
            .events
            .last()
            .map(|e| krylest::upper_bound(e.estimate, solve.tau))
            .transpose()
            .ok()
            .flatten(),
        final_relative_estimate: trace.events.last().and_then(|e| {
            let total: f64 = trace.deltas.iter().sum();
            (total > 0.0).then(|| e.estimate / total)
        }),
        final_res_norm: trace.res_norms.last().copied(),
        clamped_deltas: trace.clamped_deltas,
        oracle: report
            .as_ref()
            .map(|r| oracle_summary(&trace, r, solve.tau)),
    };
    let mut out = std::io::BufWriter::new(std::fs::File::create(&json_path)?);
    serde_json::to_writer_pretty(&mut out, &summary)
        .map_err(|e| Error::InvalidParam(format!("summary serialization failed: {e}")))?;
    writeln!(out)?;
    out.flush()?;

    println!(
        "{} ({}): {} iterations, {} estimates, termination {} -> {}, {}",
        solver.name(),
        precond.name(),
        trace.iterations,
        trace.events.len(),
        termination_label(&trace.termination),
        csv_path.display(),
        json_path.display(),
    );
    Ok(())
}
