//! CGNE: conjugate gradients on AA'y = b with x = A'y carried
//! directly. For a consistent system (b in the range of A) the iterates
//! minimize the Euclidean error norm, and the estimator increment
//! gamma_k ||r_k||^2 targets the squared Euclidean error at iterate ell.

use super::{CoeffLog, EstimatorRun, PushOutcome, SolverConfig, SolverKind, SolverTrace, Termination};
use crate::error::{Error, Result};
use crate::sparse::SparseMatrix;
use crate::vector::{axpy, norm2_slice, norm2_sq_slice, DenseVector};

pub fn cgne_solve(
    a: &SparseMatrix,
    b: &DenseVector,
    x0: Option<&DenseVector>,
    cfg: &SolverConfig,
) -> Result<(DenseVector, SolverTrace)> {
    cfg.validate()?;
    let (m, n) = (a.rows(), a.cols());
    if b.len() != m {
        return Err(Error::DimensionMismatch {
            what: "cgne_solve rhs",
            expected: m,
            got: b.len(),
        });
    }
    let mut x = match x0 {
        Some(x0) => {
            if x0.len() != n {
                return Err(Error::DimensionMismatch {
                    what: "cgne_solve x0",
                    expected: n,
                    got: x0.len(),
                });
            }
            x0.as_slice().to_vec()
        }
        None => vec![0.0; n],
    };

    // r_0 = b - A x_0; p_0 = A'r_0.
    let mut r = b.as_slice().to_vec();
    let mut scratch_m = vec![0.0; m];
    a.mat_vec_into(&x, &mut scratch_m);
    for i in 0..m {
        r[i] -= scratch_m[i];
    }
    let mut p = vec![0.0; n];
    a.mat_vec_transpose_into(&r, &mut p);
    let mut at_r = vec![0.0; n];

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
                solver: "cgne",
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
        axpy(-gamma, &scratch_m, &mut r);
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
        a.mat_vec_transpose_into(&r, &mut at_r);
        for i in 0..n {
            p[i] = at_r[i] + beta * p[i];
        }
    }

    let (deltas, events, clamped) = est.finish(&termination);
    let iterations = deltas.len();
    let final_x = DenseVector::from_unchecked(x);
    let trace = SolverTrace {
        solver: SolverKind::Cgne,
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
