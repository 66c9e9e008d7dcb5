//! Preconditioned solver variants. PCGLS and PCGNE carry their
//! iterates in the original variables throughout; PLSQR iterates in
//! the transformed variables and maps back through L^{-T}; PCRAIG
//! bidiagonalizes L^{-1}A and needs no transformation at all. All four
//! estimators keep targeting the original-problem error norms: the
//! split transformation preserves the A'A-norm of the least-squares
//! error and the Euclidean norm of the least-norm error.

use super::SplitPreconditioner;
use crate::error::{Error, Result};
use crate::solvers::{
    CoeffLog, LinearOperator, SolverConfig, SolverKind, SolverTrace, Termination,
};
use crate::solvers::{craig_core, lsqr_core};
use crate::sparse::SparseMatrix;
use crate::vector::{axpy, dot_slices, norm2_slice, norm2_sq_slice, update_direction, DenseVector};

// Estimator plumbing shared with the unpreconditioned loops.
use crate::solvers::{EstimatorRun, PushOutcome};

/// A L^{-T}: the least-squares composition.
struct LsOperator<'a> {
    a: &'a SparseMatrix,
    l: &'a SplitPreconditioner,
}

impl LinearOperator for LsOperator<'_> {
    fn rows(&self) -> usize {
        self.a.rows()
    }
    fn cols(&self) -> usize {
        self.a.cols()
    }
    fn apply_into(&self, v: &[f64], out: &mut [f64]) {
        let t = self.l.solve_lower_transpose(v);
        self.a.apply_into(&t, out);
    }
    fn apply_transpose_into(&self, u: &[f64], out: &mut [f64]) {
        let mut t = vec![0.0; self.a.cols()];
        self.a.apply_transpose_into(u, &mut t);
        out.copy_from_slice(&self.l.solve_lower(&t));
    }
}

/// L^{-1} A: the least-norm composition.
struct LnOperator<'a> {
    a: &'a SparseMatrix,
    l: &'a SplitPreconditioner,
}

impl LinearOperator for LnOperator<'_> {
    fn rows(&self) -> usize {
        self.a.rows()
    }
    fn cols(&self) -> usize {
        self.a.cols()
    }
    fn apply_into(&self, v: &[f64], out: &mut [f64]) {
        let mut t = vec![0.0; self.a.rows()];
        self.a.apply_into(v, &mut t);
        out.copy_from_slice(&self.l.solve_lower(&t));
    }
    fn apply_transpose_into(&self, u: &[f64], out: &mut [f64]) {
        let t = self.l.solve_lower_transpose(u);
        self.a.apply_transpose_into(&t, out);
    }
}

fn check_ls_dims(a: &SparseMatrix, m: &SplitPreconditioner) -> Result<()> {
    if m.dim() != a.cols() {
        return Err(Error::DimensionMismatch {
            what: "least-squares preconditioner",
            expected: a.cols(),
            got: m.dim(),
        });
    }
    Ok(())
}

fn check_ln_dims(a: &SparseMatrix, m: &SplitPreconditioner) -> Result<()> {
    if m.dim() != a.rows() {
        return Err(Error::DimensionMismatch {
            what: "least-norm preconditioner",
            expected: a.rows(),
            got: m.dim(),
        });
    }
    Ok(())
}

/// Preconditioned CGLS. The increment gamma-hat_k ||s-hat_k||^2 still
/// targets the original squared A'A-norm error at iterate ell.
pub fn pcgls_solve(
    a: &SparseMatrix,
    b: &DenseVector,
    x0: Option<&DenseVector>,
    m: &SplitPreconditioner,
    cfg: &SolverConfig,
) -> Result<(DenseVector, SolverTrace)> {
    cfg.validate()?;
    check_ls_dims(a, m)?;
    let (rows, n) = (a.rows(), a.cols());
    if b.len() != rows {
        return Err(Error::DimensionMismatch {
            what: "pcgls_solve rhs",
            expected: rows,
            got: b.len(),
        });
    }
    let mut x = match x0 {
        Some(x0) => {
            if x0.len() != n {
                return Err(Error::DimensionMismatch {
                    what: "pcgls_solve x0",
                    expected: n,
                    got: x0.len(),
                });
            }
            x0.as_slice().to_vec()
        }
        None => vec![0.0; n],
    };

    // r_0 = b - A x_0; s_0 = p_0 = L^{-1} A' r_0.
    let mut r = b.as_slice().to_vec();
    let mut scratch_m = vec![0.0; rows];
    a.mat_vec_into(&x, &mut scratch_m);
    for i in 0..rows {
        r[i] -= scratch_m[i];
    }
    let mut at_r = vec![0.0; n];
    a.mat_vec_transpose_into(&r, &mut at_r);
    let mut s = m.solve_lower(&at_r);
    let mut p = s.clone();
    let mut q = vec![0.0; rows];

    let mut est = EstimatorRun::new(cfg, a.frobenius_norm(), norm2_slice(b.as_slice()))?;
    let mut res_norms = Vec::new();
    let mut gammas = Vec::new();
    let mut s_norm_sqs = Vec::new();
    let mut local_orth: Vec<Option<f64>> = Vec::new();
    let mut iterates = Vec::new();
    if cfg.record_iterates {
        iterates.push(DenseVector::from_unchecked(x.clone()));
    }

    let mut s_sq = norm2_sq_slice(&s);
    let mut prev_s_sq = 0.0;
    let mut prev_p: Vec<f64> = Vec::new();
    let mut termination = Termination::MaxIter;

    for k in 0..cfg.max_iter {
        if s_sq == 0.0 {
            termination = Termination::ResidualZero;
            break;
        }
        let t = m.solve_lower_transpose(&p);
        a.mat_vec_into(&t, &mut q);
        let q_sq = norm2_sq_slice(&q);
        if q_sq == 0.0 {
            return Err(Error::Breakdown {
                solver: "pcgls",
                msg: format!("||A t_{k}|| = 0 while ||s_{k}|| > 0"),
            });
        }
        if cfg.record_local_orthogonality {
            local_orth.push(if k == 0 {
                None
            } else {
                Some(dot_slices(&s, &prev_p) / prev_s_sq)
            });
        }
        res_norms.push(norm2_slice(&r));
        let gamma = s_sq / q_sq;
        gammas.push(gamma);
        s_norm_sqs.push(s_sq);
        let stop = est.push(k, gamma * s_sq, norm2_slice(&x))?;
        axpy(gamma, &t, &mut x);
        axpy(-gamma, &q, &mut r);
        if cfg.record_iterates {
            iterates.push(DenseVector::from_unchecked(x.clone()));
        }
        if let PushOutcome::Stop { ell, k: at } = stop {
            termination = Termination::EstimateStop { ell, k: at };
            break;
        }
        a.mat_vec_transpose_into(&r, &mut at_r);
        let new_s = m.solve_lower(&at_r);
        let new_s_sq = norm2_sq_slice(&new_s);
        let beta = new_s_sq / s_sq;
        prev_s_sq = s_sq;
        s_sq = new_s_sq;
        s = new_s;
        if cfg.record_local_orthogonality {
            prev_p = p.clone();
        }
        update_direction(&s, beta, &mut p);
    }

    let (deltas, events, clamped) = est.finish(&termination);
    let iterations = deltas.len();
    let final_x = DenseVector::from_unchecked(x);
    let trace = SolverTrace {
        solver: SolverKind::Pcgls,
        iterations,
        res_norms,
        deltas,
        events,
        local_orth,
        iterates,
        coeffs: CoeffLog::Cgls {
            gamma: gammas,
            s_norm_sq: s_norm_sqs,
        },
        termination,
        final_x: final_x.clone(),
        clamped_deltas: clamped,
    };
    Ok((final_x, trace))
}

/// Preconditioned LSQR: LSQR on A L^{-T} by operator composition, with
/// the final (and recorded) iterates mapped back by x = L^{-T} x-hat.
pub fn plsqr_solve(
    a: &SparseMatrix,
    b: &DenseVector,
    m: &SplitPreconditioner,
    cfg: &SolverConfig,
) -> Result<(DenseVector, SolverTrace)> {
    check_ls_dims(a, m)?;
    let op = LsOperator { a, l: m };
    let map = |xhat: &[f64]| m.solve_lower_transpose(xhat);
    lsqr_core(
        &op,
        b.as_slice(),
        cfg,
        SolverKind::Plsqr,
        Some(&map),
        a.frobenius_norm(),
        norm2_slice(b.as_slice()),
    )
}

/// Preconditioned CGNE. Iterates update the original variables
/// directly; the residual recurrence runs in the transformed space
/// (r-hat = L^{-1} r), which is what the trace records.
pub fn pcgne_solve(
    a: &SparseMatrix,
    b: &DenseVector,
    x0: Option<&DenseVector>,
    m: &SplitPreconditioner,
    cfg: &SolverConfig,
) -> Result<(DenseVector, SolverTrace)> {
    cfg.validate()?;
    check_ln_dims(a, m)?;
    let (rows, n) = (a.rows(), a.cols());
    if b.len() != rows {
        return Err(Error::DimensionMismatch {
            what: "pcgne_solve rhs",
            expected: rows,
            got: b.len(),
        });
    }
    let mut x = match x0 {
        Some(x0) => {
            if x0.len() != n {
                return Err(Error::DimensionMismatch {
                    what: "pcgne_solve x0",
                    expected: n,
                    got: x0.len(),
                });
            }
            x0.as_slice().to_vec()
        }
        None => vec![0.0; n],
    };

    // r-hat_0 = L^{-1}(b - A x_0); p-hat_0 = A' L^{-T} r-hat_0.
    let mut resid = b.as_slice().to_vec();
    let mut scratch_m = vec![0.0; rows];
    a.mat_vec_into(&x, &mut scratch_m);
    for i in 0..rows {
        resid[i] -= scratch_m[i];
    }
    let mut r = m.solve_lower(&resid);
    let mut p = vec![0.0; n];
    let lt_r = m.solve_lower_transpose(&r);
    a.mat_vec_transpose_into(&lt_r, &mut p);

    let mut est = EstimatorRun::new(cfg, a.frobenius_norm(), norm2_slice(b.as_slice()))?;
    let mut res_norms = Vec::new();
    let mut gammas = Vec::new();
    let mut r_norm_sqs = Vec::new();
    let mut iterates = Vec::new();
    if cfg.record_iterates {
        iterates.push(DenseVector::from_unchecked(x.clone()));
    }

    let mut r_sq = norm2_sq_slice(&r);
    let mut termination = Termination::MaxIter;

    for k in 0..cfg.max_iter {
        if r_sq == 0.0 {
            termination = Termination::ResidualZero;
            break;
        }
        let p_sq = norm2_sq_slice(&p);
        if p_sq == 0.0 {
            return Err(Error::Breakdown {
                solver: "pcgne",
                msg: format!("||p_{k}|| = 0 while ||r_{k}|| > 0 (is b in the range of A?)"),
            });
        }
        res_norms.push(r_sq.sqrt());
        let gamma = r_sq / p_sq;
        gammas.push(gamma);
        r_norm_sqs.push(r_sq);
        let stop = est.push(k, gamma * r_sq, norm2_slice(&x))?;
        axpy(gamma, &p, &mut x);
        a.mat_vec_into(&p, &mut scratch_m);
        let lap = m.solve_lower(&scratch_m);
        axpy(-gamma, &lap, &mut r);
        if cfg.record_iterates {
            iterates.push(DenseVector::from_unchecked(x.clone()));
        }
        if let PushOutcome::Stop { ell, k: at } = stop {
            termination = Termination::EstimateStop { ell, k: at };
            break;
        }
        let new_r_sq = norm2_sq_slice(&r);
        let beta = new_r_sq / r_sq;
        r_sq = new_r_sq;
        let lt_r = m.solve_lower_transpose(&r);
        let mut at_ltr = vec![0.0; n];
        a.mat_vec_transpose_into(&lt_r, &mut at_ltr);
        for i in 0..n {
            p[i] = at_ltr[i] + beta * p[i];
        }
    }

    let (deltas, events, clamped) = est.finish(&termination);
    let iterations = deltas.len();
    let final_x = DenseVector::from_unchecked(x);
    let trace = SolverTrace {
        solver: SolverKind::Pcgne,
        iterations,
        res_norms,
        deltas,
        events,
        local_orth: Vec::new(),
        iterates,
        coeffs: CoeffLog::Cgne {
            gamma: gammas,
            r_norm_sq: r_norm_sqs,
        },
        termination,
        final_x: final_x.clone(),
        clamped_deltas: clamped,
    };
    Ok((final_x, trace))
}

/// Preconditioned CRAIG: bidiagonalization of L^{-1}A with the RHS
/// L^{-1}b; iterates are already in the original variables, so no
/// final transformation is needed.
pub fn pcraig_solve(
    a: &SparseMatrix,
    b: &DenseVector,
    m: &SplitPreconditioner,
    cfg: &SolverConfig,
) -> Result<(DenseVector, SolverTrace)> {
    check_ln_dims(a, m)?;
    let op = LnOperator { a, l: m };
    let b_hat = m.solve_lower(b.as_slice());
    let (x, _, trace) = craig_core(
        &op,
        &b_hat,
        cfg,
        SolverKind::Pcraig,
        false,
        a.frobenius_norm(),
        norm2_slice(b.as_slice()),
    )?;
    Ok((x, trace))
}
