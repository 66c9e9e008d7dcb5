//! Dense ground-truth engine for desk-scale verification.
//!
//! Everything here is deliberately independent of the solver loops: the
//! true solution comes from a dense SVD, error trajectories are
//! recomputed from recorded iterates, and the diagnostics (ideal delay,
//! per-step identity residuals, plateau index) are what the estimator's
//! reliability claims are checked against.

use crate::error::{Error, Result};
use crate::solvers::SolverTrace;
use crate::sparse::SparseMatrix;
use crate::vector::DenseVector;
use nalgebra::DMatrix;

/// Which error norm a trajectory measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormKind {
    /// ||x_true - x_k||^2_{A'A} = ||A (x_true - x_k)||^2 (least squares).
    EnergyAtA,
    /// ||x_true - x_k||^2 (least norm).
    Euclidean,
    /// (x_true - x_k)' A (x_true - x_k) for square SPD systems (CG).
    EnergyA,
}

/// Ground-truth summary of one solve.
#[derive(Debug, Clone)]
pub struct OracleReport {
    pub x_true: DenseVector,
    /// ||b - A x_true||: the norm of the unreachable residual part.
    pub r_true_norm: f64,
    /// Squared true errors per iterate, in the requested norm.
    pub true_errors: Vec<f64>,
    /// Per-index minimal delay achieving relative accuracy tau;
    /// None where no delay within the trajectory suffices (the
    /// reported sentinel is remaining length + 1).
    pub ideal_delays: Vec<IdealDelay>,
    /// Relative error of the per-step telescoping identity.
    pub hs_rel_errors: Vec<f64>,
    pub plateau_index: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IdealDelay {
    Finite(usize),
    /// No delay within the recorded trajectory achieves the accuracy;
    /// carries the sentinel value (remaining length + 1).
    Unbounded(usize),
}

impl IdealDelay {
    pub fn is_finite(&self) -> bool {
        matches!(self, IdealDelay::Finite(_))
    }

    /// The delay count, sentinel included.
    pub fn count(&self) -> usize {
        match self {
            IdealDelay::Finite(d) | IdealDelay::Unbounded(d) => *d,
        }
    }
}

const DESK_CAP: usize = 2000;

/// Minimum-norm least-squares solution by dense SVD with the cutoff
/// sigma_i <= eps_rank * sigma_max, eps_rank = 1e-12 * max(m, n).
/// Returns the solution and ||b - A x||.
pub fn min_norm_solve(a: &SparseMatrix, b: &DenseVector) -> Result<(DenseVector, f64)> {
    let (m, n) = (a.rows(), a.cols());
    if m.min(n) > DESK_CAP {
        return Err(Error::DeskScaleExceeded {
            dim: m.min(n),
            cap: DESK_CAP,
        });
    }
    if b.len() != m {
        return Err(Error::DimensionMismatch {
            what: "min_norm_solve rhs",
            expected: m,
            got: b.len(),
        });
    }
    let dense = DMatrix::from_row_slice(m, n, &a.to_dense());
    let svd = dense.svd(true, true);
    let u = svd.u.as_ref().expect("u requested");
    let v_t = svd.v_t.as_ref().expect("v_t requested");
    let sigma = &svd.singular_values;
    let sigma_max = sigma.iter().copied().fold(0.0f64, f64::max);
    let cutoff = 1e-12 * (m.max(n) as f64) * sigma_max;

    let bvec = nalgebra::DVector::from_column_slice(b.as_slice());
    let mut x = nalgebra::DVector::zeros(n);
    for i in 0..sigma.len() {
        let s = sigma[i];
        if s <= cutoff {
            continue;
        }
        let coeff = u.column(i).dot(&bvec) / s;
        x.axpy(coeff, &v_t.row(i).transpose(), 1.0);
    }
    let x_true = DenseVector::new(x.iter().copied().collect())?;
    let mut ax = vec![0.0; m];
    a.mat_vec_into(x_true.as_slice(), &mut ax);
    let mut r_sq = 0.0;
    for i in 0..m {
        let d = b[i] - ax[i];
        r_sq += d * d;
    }
    Ok((x_true, r_sq.sqrt()))
}

/// Largest and smallest nonzero singular values of A (dense SVD, desk
/// scale only). The smallest is taken above the pseudoinverse cutoff.
pub fn singular_extent(a: &SparseMatrix) -> Result<(f64, f64)> {
    let (m, n) = (a.rows(), a.cols());
    if m.min(n) > DESK_CAP {
        return Err(Error::DeskScaleExceeded {
            dim: m.min(n),
            cap: DESK_CAP,
        });
    }
    let dense = DMatrix::from_row_slice(m, n, &a.to_dense());
    let svd = dense.svd(false, false);
    let sigma_max = svd.singular_values.iter().copied().fold(0.0f64, f64::max);
    let cutoff = 1e-12 * (m.max(n) as f64) * sigma_max;
    let sigma_min = svd
        .singular_values
        .iter()
        .copied()
        .filter(|&s| s > cutoff)
        .fold(f64::INFINITY, f64::min);
    Ok((sigma_max, sigma_min))
}

/// Squared true errors of the recorded iterates in the given norm.
pub fn true_error_trajectory(
    trace: &SolverTrace,
    x_true: &DenseVector,
    a: &SparseMatrix,
    norm_kind: NormKind,
) -> Result<Vec<f64>> {
    if trace.iterates.is_empty() {
        return Err(Error::InvalidParam(
            "trace has no recorded iterates; run the solver with record_iterates".into(),
        ));
    }
    let n = a.cols();
    if x_true.len() != n {
        return Err(Error::DimensionMismatch {
            what: "true_error_trajectory x_true",
            expected: n,
            got: x_true.len(),
        });
    }
    let mut out = Vec::with_capacity(trace.iterates.len());
    let mut diff = vec![0.0; n];
    let mut work = vec![0.0; a.rows().max(n)];
    for xk in &trace.iterates {
        for i in 0..n {
            diff[i] = x_true[i] - xk[i];
        }
        let e_sq = match norm_kind {
            NormKind::Euclidean => crate::vector::dot_slices(&diff, &diff),
            NormKind::EnergyAtA => {
                a.mat_vec_into(&diff, &mut work[..a.rows()]);
                crate::vector::dot_slices(&work[..a.rows()], &work[..a.rows()])
            }
            NormKind::EnergyA => {
                a.mat_vec_into(&diff, &mut work[..n]);
                crate::vector::dot_slices(&diff, &work[..n])
            }
        };
        out.push(e_sq);
    }
    Ok(out)
}

/// For each index ell, the minimal delay d >= 0 such that the
/// exact-arithmetic bound E_ell^2 - E_{ell+d+1}^2 has relative accuracy
/// tau, i.e. (E_ell^2 - E_{ell+d+1}^2) / E_ell^2 >= 1 - tau.
pub fn ideal_delay(true_errors: &[f64], tau: f64) -> Result<Vec<IdealDelay>> {
    if true_errors.is_empty() {
        return Err(Error::InvalidParam("empty error trajectory".into()));
    }
    if !(tau > 0.0 && tau < 1.0) {
        return Err(Error::InvalidParam(format!(
            "tau must lie in (0, 1), got {tau}"
        )));
    }
    let len = true_errors.len();
    let mut out = Vec::with_capacity(len);
    for ell in 0..len {
        let e_ell = true_errors[ell];
        if e_ell == 0.0 {
            out.push(IdealDelay::Finite(0));
            continue;
        }
        let mut found = None;
        for d in 0..len.saturating_sub(ell + 1) {
            let drop = (e_ell - true_errors[ell + d + 1]) / e_ell;
            if drop >= 1.0 - tau {
                found = Some(d);
                break;
            }
        }
        match found {
            Some(d) => out.push(IdealDelay::Finite(d)),
            None => out.push(IdealDelay::Unbounded(len - ell)),
        }
    }
    Ok(out)
}

/// Relative error of the telescoping identity per step:
/// |(E_{k}^2 - E_{k+1}^2) - Delta_k| / (E_k^2 - E_{k+1}^2), with
/// +infinity where the denominator underflows below 1e-300.
pub fn hs_relative_error(true_errors: &[f64], increments: &[f64]) -> Result<Vec<f64>> {
    if true_errors.len() != increments.len() + 1 {
        return Err(Error::DimensionMismatch {
            what: "hs_relative_error",
            expected: increments.len() + 1,
            got: true_errors.len(),
        });
    }
    let mut out = Vec::with_capacity(increments.len());
    for k in 0..increments.len() {
        let den = true_errors[k] - true_errors[k + 1];
        if den.abs() < 1e-300 {
            out.push(f64::INFINITY);
        } else {
            out.push((den - increments[k]).abs() / den);
        }
    }
    Ok(out)
}

pub const PLATEAU_WINDOW: usize = 10;
const PLATEAU_REL_DECREASE: f64 = 1e-3;

/// First index where the relative decrease over a 10-iteration window
/// falls below 1e-3 (the maximal-attainable-accuracy plateau); the
/// trajectory length if it never does.
pub fn detect_plateau(true_errors: &[f64]) -> usize {
    let len = true_errors.len();
    for k in PLATEAU_WINDOW..len {
        let base = true_errors[k - PLATEAU_WINDOW];
        if base == 0.0 {
            return k;
        }
        if (base - true_errors[k]) / base < PLATEAU_REL_DECREASE {
            return k;
        }
    }
    len
}

/// Assemble the full report for a recorded solve.
pub fn oracle_report(
    a: &SparseMatrix,
    b: &DenseVector,
    trace: &SolverTrace,
    norm_kind: NormKind,
    tau: f64,
) -> Result<OracleReport> {
    let (x_true, r_true_norm) = min_norm_solve(a, b)?;
    let true_errors = true_error_trajectory(trace, &x_true, a, norm_kind)?;
    let ideal_delays = ideal_delay(&true_errors, tau)?;
    let hs_rel_errors = hs_relative_error(&true_errors, &trace.deltas)?;
    let plateau_index = detect_plateau(&true_errors);
    Ok(OracleReport {
        x_true,
        r_true_norm,
        true_errors,
        ideal_delays,
        hs_rel_errors,
        plateau_index,
    })
}
