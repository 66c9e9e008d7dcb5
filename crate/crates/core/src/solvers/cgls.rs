//! CGLS: conjugate gradients on the normal equations A'Ax = A'b,
//! rearranged so no A'A product is ever formed. The estimator increment
//! gamma_k ||s_k||^2 targets the squared A'A-norm error at iterate ell,
//! equivalently ||r_ell||^2 - ||r||^2 with r the exact residual.

use super::{CoeffLog, EstimatorRun, PushOutcome, SolverConfig, SolverKind, SolverTrace, Termination};
use crate::error::{Error, Result};
use crate::sparse::SparseMatrix;
use crate::vector::{axpy, dot_slices, norm2_slice, norm2_sq_slice, update_direction, DenseVector};

pub fn cgls_solve(
    a: &SparseMatrix,
    b: &DenseVector,
    x0: Option<&DenseVector>,
    cfg: &SolverConfig,
) -> Result<(DenseVector, SolverTrace)> {
    cfg.validate()?;
    let (m, n) = (a.rows(), a.cols());
    if b.len() != m {
        return Err(Error::DimensionMismatch {
            what: "cgls_solve rhs",
            expected: m,
            got: b.len(),
        });
    }
    let mut x = match x0 {
        Some(x0) => {
            if x0.len() != n {
                return Err(Error::DimensionMismatch {
                    what: "cgls_solve x0",
                    expected: n,
                    got: x0.len(),
                });
            }
            x0.as_slice().to_vec()
        }
        None => vec![0.0; n],
    };

    // r_0 = b - A x_0; s_0 = p_0 = A'r_0.
    let mut r = b.as_slice().to_vec();
    let mut scratch_m = vec![0.0; m];
    a.mat_vec_into(&x, &mut scratch_m);
    for i in 0..m {
        r[i] -= scratch_m[i];
    }
    let mut s = vec![0.0; n];
    a.mat_vec_transpose_into(&r, &mut s);
    let mut p = s.clone();
    let mut q = vec![0.0; m];

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
            // Normal-equations residual vanished: least-squares
            // solution reached exactly.
            termination = Termination::ResidualZero;
            break;
        }
        a.mat_vec_into(&p, &mut q);
        let q_sq = norm2_sq_slice(&q);
        if q_sq == 0.0 {
            return Err(Error::Breakdown {
                solver: "cgls",
                msg: format!("||Ap_{k}|| = 0 while ||s_{k}|| > 0"),
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
        axpy(gamma, &p, &mut x);
        axpy(-gamma, &q, &mut r);
        if cfg.record_iterates {
            iterates.push(DenseVector::from_unchecked(x.clone()));
        }
        if let PushOutcome::Stop { ell, k: at } = stop {
            termination = Termination::EstimateStop { ell, k: at };
            break;
        }
        a.mat_vec_transpose_into(&r, &mut s);
        let new_s_sq = norm2_sq_slice(&s);
        let beta = new_s_sq / s_sq;
        prev_s_sq = s_sq;
        s_sq = new_s_sq;
        if cfg.record_local_orthogonality {
            prev_p = p.clone();
        }
        update_direction(&s, beta, &mut p);
    }

    let (deltas, events, clamped) = est.finish(&termination);
    let iterations = deltas.len();
    let final_x = DenseVector::from_unchecked(x);
    let trace = SolverTrace {
        solver: SolverKind::Cgls,
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
