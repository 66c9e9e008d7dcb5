//! Conjugate gradients for a symmetric positive (semi-)definite system,
//! instrumented with the adaptive estimator. For a singular matrix the
//! system must be consistent and x_0 must lie in the range of A.

use super::{CoeffLog, EstimatorRun, PushOutcome, SolverConfig, SolverKind, SolverTrace, Termination};
use crate::error::{Error, Result};
use crate::sparse::SparseMatrix;
use crate::vector::{axpy, dot_slices, norm2_slice, norm2_sq_slice, update_direction, DenseVector};

/// The estimator increment gamma_k ||r_k||^2 targets the squared
/// A-norm error at iterate ell.
pub fn cg_solve(
    a: &SparseMatrix,
    b: &DenseVector,
    x0: Option<&DenseVector>,
    cfg: &SolverConfig,
) -> Result<(DenseVector, SolverTrace)> {
    cfg.validate()?;
    if a.rows() != a.cols() {
        return Err(Error::InvalidMatrix(format!(
            "cg needs a square matrix, got {} x {}",
            a.rows(),
            a.cols()
        )));
    }
    let n = a.cols();
    if b.len() != n {
        return Err(Error::DimensionMismatch {
            what: "cg_solve rhs",
            expected: n,
            got: b.len(),
        });
    }
    let mut x = match x0 {
        Some(x0) => {
            if x0.len() != n {
                return Err(Error::DimensionMismatch {
                    what: "cg_solve x0",
                    expected: n,
                    got: x0.len(),
                });
            }
            x0.as_slice().to_vec()
        }
        None => vec![0.0; n],
    };

    let mut r = b.as_slice().to_vec();
    let mut ax = vec![0.0; n];
    a.mat_vec_into(&x, &mut ax);
    for i in 0..n {
        r[i] -= ax[i];
    }
    let mut p = r.clone();
    let mut ap = vec![0.0; n];

    let mut est = EstimatorRun::new(cfg, a.frobenius_norm(), norm2_slice(b.as_slice()))?;
    let mut res_norms = Vec::new();
    let mut gammas = Vec::new();
    let mut res_sqs = Vec::new();
    let mut local_orth: Vec<Option<f64>> = Vec::new();
    let mut iterates = Vec::new();
    if cfg.record_iterates {
        iterates.push(DenseVector::from_unchecked(x.clone()));
    }

    let mut r_sq = norm2_sq_slice(&r);
    let mut prev_r_sq = 0.0;
    let mut prev_p: Vec<f64> = Vec::new();
    let mut termination = Termination::MaxIter;

    for k in 0..cfg.max_iter {
        res_norms.push(r_sq.sqrt());
        if r_sq == 0.0 {
            res_norms.pop();
            termination = Termination::ResidualZero;
            break;
        }
        a.mat_vec_into(&p, &mut ap);
        let p_a_p = dot_slices(&p, &ap);
        if p_a_p <= 0.0 {
            return Err(Error::NotSpd { iteration: k });
        }
        if cfg.record_local_orthogonality {
            local_orth.push(if k == 0 {
                None
            } else {
                Some(dot_slices(&r, &prev_p) / prev_r_sq)
            });
        }
        let gamma = r_sq / p_a_p;
        gammas.push(gamma);
        res_sqs.push(r_sq);
        match est.push(k, gamma * r_sq, norm2_slice(&x))? {
            PushOutcome::Stop { ell, k: at } => {
                termination = Termination::EstimateStop { ell, k: at };
                // Finish this iteration so the iterate count matches
                // the pushed increments.
                axpy(gamma, &p, &mut x);
                axpy(-gamma, &ap, &mut r);
                if cfg.record_iterates {
                    iterates.push(DenseVector::from_unchecked(x.clone()));
                }
                break;
            }
            PushOutcome::Continue => {}
        }
        axpy(gamma, &p, &mut x);
        axpy(-gamma, &ap, &mut r);
        let new_r_sq = norm2_sq_slice(&r);
        let beta = new_r_sq / r_sq;
        prev_r_sq = r_sq;
        r_sq = new_r_sq;
        if cfg.record_local_orthogonality {
            prev_p = p.clone();
        }
        update_direction(&r, beta, &mut p);
        if cfg.record_iterates {
            iterates.push(DenseVector::from_unchecked(x.clone()));
        }
    }

    let (deltas, events, clamped) = est.finish(&termination);
    let iterations = deltas.len();
    let final_x = DenseVector::from_unchecked(x);
    let trace = SolverTrace {
        solver: SolverKind::Cg,
        iterations,
        res_norms,
        deltas,
        events,
        local_orth,
        iterates,
        coeffs: CoeffLog::Cg {
            gamma: gammas,
            res_sq: res_sqs,
        },
        termination,
        final_x: final_x.clone(),
        clamped_deltas: clamped,
    };
    Ok((final_x, trace))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_converges_in_one_iteration() {
        let a = SparseMatrix::identity(3);
        let b = DenseVector::new(vec![2.0, -1.0, 0.5]).unwrap();
        let cfg = SolverConfig::default();
        let (x, trace) = cg_solve(&a, &b, None, &cfg).unwrap();
        assert_eq!(x, b);
        assert_eq!(trace.iterations, 1);
        // gamma_0 = 1, so Delta_0 = ||b||^2.
        assert!((trace.deltas[0] - 5.25).abs() < 1e-14);
        assert_eq!(trace.termination, Termination::ResidualZero);
    }

    #[test]
    fn diag_two_by_two_hand_solve() {
        let a = SparseMatrix::diagonal(&[1.0, 2.0]).unwrap();
        let b = DenseVector::new(vec![1.0, 1.0]).unwrap();
        let cfg = SolverConfig::default();
        let (x, trace) = cg_solve(&a, &b, None, &cfg).unwrap();
        assert!(trace.iterations <= 2);
        assert!((x[0] - 1.0).abs() < 1e-14);
        assert!((x[1] - 0.5).abs() < 1e-14);
        // Telescoping with zero final error: the increments sum to
        // ||x||_A^2 = 1*1 + 2*(1/4) = 1.5.
        let sum: f64 = trace.deltas.iter().sum();
        assert!((sum - 1.5).abs() < 1e-14, "sum {sum}");
    }

    #[test]
    fn indefinite_matrix_is_reported() {
        let a = SparseMatrix::diagonal(&[1.0, -1.0]).unwrap();
        let b = DenseVector::new(vec![0.0, 1.0]).unwrap();
        let err = cg_solve(&a, &b, None, &SolverConfig::default()).unwrap_err();
        assert!(matches!(err, Error::NotSpd { .. }));
    }

    #[test]
    fn estimator_events_fire_on_slow_problem() {
        // Tridiagonal SPD with slow decay so estimates appear.
        let n = 60;
        let mut triplets = Vec::new();
        for i in 0..n {
            triplets.push((i, i, 2.0));
            if i + 1 < n {
                triplets.push((i, i + 1, -1.0));
                triplets.push((i + 1, i, -1.0));
            }
        }
        let a = SparseMatrix::from_triplets(n, n, &triplets).unwrap();
        let b = DenseVector::new(vec![1.0; n]).unwrap();
        let cfg = SolverConfig {
            max_iter: 200,
            ..SolverConfig::default()
        };
        let (_, trace) = cg_solve(&a, &b, None, &cfg).unwrap();
        assert!(!trace.events.is_empty());
        for w in trace.events.windows(2) {
            assert!(w[0].ell < w[1].ell);
        }
    }
}
