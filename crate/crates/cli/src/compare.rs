//! Side-by-side divergence report for two solver configurations on the
//! same instance: supports the CGLS/LSQR and CGNE/CRAIG equivalence
//! checks from the command line.

use crate::instance::resolve;
use crate::run::{execute, solver_config};
use crate::{InstanceArgs, PrecondArg, SolveArgs, SolverArg};
use krylest::{Error, Result};
use serde::Serialize;

#[derive(Serialize)]
struct CompareReport {
    solver_a: &'static str,
    solver_b: &'static str,
    preconditioner_a: &'static str,
    preconditioner_b: &'static str,
    iterates_compared: usize,
    max_iterate_distance: f64,
    /// Reference scale: norm of the last iterate of run A.
    x_norm: f64,
    estimates_compared: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    max_estimate_ratio_dev: Option<f64>,
}

pub fn compare(
    solver_a: SolverArg,
    solver_b: SolverArg,
    precond_a: PrecondArg,
    precond_b: PrecondArg,
    instance: &InstanceArgs,
    solve: &SolveArgs,
) -> Result<()> {
    // Both runs share one resolved instance, so the "same instance"
    // precondition holds by construction. The solvers must agree on
    // the RHS kind, though.
    if solver_a.is_least_norm() != solver_b.is_least_norm() {
        return Err(Error::InvalidParam(
            "cannot compare a least-squares solver with a least-norm solver: they target different right-hand sides".into(),
        ));
    }
    let inst = resolve(instance, solver_a)?;
    let mut cfg = solver_config(solve, false);
    cfg.record_iterates = true;

    let trace_a = execute(solver_a, precond_a, &inst, &cfg)?;
    let trace_b = execute(solver_b, precond_b, &inst, &cfg)?;

    let kmax = trace_a.iterates.len().min(trace_b.iterates.len());
    let mut max_dist = 0.0f64;
    for k in 0..kmax {
        let d: f64 = trace_a.iterates[k]
            .as_slice()
            .iter()
            .zip(trace_b.iterates[k].as_slice())
            .map(|(p, q)| (p - q) * (p - q))
            .sum::<f64>()
            .sqrt();
        max_dist = max_dist.max(d);
    }

    let mut max_ratio_dev: Option<f64> = None;
    let mut estimates_compared = 0;
    for ev_a in &trace_a.events {
        if let Some(ev_b) = trace_b.events.iter().find(|e| e.ell == ev_a.ell) {
            estimates_compared += 1;
            if ev_b.estimate != 0.0 {
                let dev = (ev_a.estimate / ev_b.estimate - 1.0).abs();
                max_ratio_dev = Some(max_ratio_dev.map_or(dev, |m: f64| m.max(dev)));
            }
        }
    }

    let report = CompareReport {
        solver_a: solver_a.name(),
        solver_b: solver_b.name(),
        preconditioner_a: precond_a.name(),
        preconditioner_b: precond_b.name(),
        iterates_compared: kmax,
        max_iterate_distance: max_dist,
        x_norm: krylest::norm2(&trace_a.final_x),
        estimates_compared,
        max_estimate_ratio_dev: max_ratio_dev,
    };
    println!("{}", serde_json::to_string_pretty(&report).expect("serializable report"));
    Ok(())
}
