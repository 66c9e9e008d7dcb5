//! LSQR: Golub-Kahan bidiagonalization with a QR update by Givens
//! rotations. Mathematically equivalent to CGLS; the estimator
//! increment phi_k^2 drains the squared A'A-norm error from iterate
//! k - 1 to iterate k and is stored under buffer index k - 1 so the
//! shared index convention (increment j goes from iterate j to j + 1)
//! holds across all solvers.

use super::bidiag::{golub_kahan_step, BidiagState, GkStep};
use super::{
    CoeffLog, EstimatorRun, LinearOperator, PushOutcome, SolverConfig, SolverKind, SolverTrace,
    Termination,
};
use crate::error::{Error, Result};
use crate::sparse::SparseMatrix;
use crate::vector::{axpy, dot_slices, norm2_slice, DenseVector};

/// Starts from x_0 = 0, as the algorithm statement fixes.
pub fn lsqr_solve(
    a: &SparseMatrix,
    b: &DenseVector,
    cfg: &SolverConfig,
) -> Result<(DenseVector, SolverTrace)> {
    lsqr_core(
        a,
        b.as_slice(),
        cfg,
        SolverKind::Lsqr,
        None,
        a.frobenius_norm(),
        norm2_slice(b.as_slice()),
    )
}

/// Shared loop: `op` is A itself or a preconditioned composition; when
/// the iteration runs in transformed coordinates, `map_iterate` takes a
/// hat-space iterate back to the original variables for recording and
/// for the final solution.
pub(crate) fn lsqr_core(
    op: &dyn LinearOperator,
    b: &[f64],
    cfg: &SolverConfig,
    kind: SolverKind,
    map_iterate: Option<&dyn Fn(&[f64]) -> Vec<f64>>,
    norm_a: f64,
    norm_b: f64,
) -> Result<(DenseVector, SolverTrace)> {
    cfg.validate()?;
    if b.len() != op.rows() {
        return Err(Error::DimensionMismatch {
            what: "lsqr rhs",
            expected: op.rows(),
            got: b.len(),
        });
    }
    let n = op.cols();
    let map = |x: &[f64]| -> Vec<f64> {
        match map_iterate {
            Some(f) => f(x),
            None => x.to_vec(),
        }
    };

    let mut state = BidiagState::init(op, b)?;
    let mut x = vec![0.0; n];
    let mut w = state.v.clone();
    let mut rho_bar = state.alpha;
    let mut phi_bar = state.beta;

    let mut est = EstimatorRun::new(cfg, norm_a, norm_b)?;
    let mut res_norms = Vec::new();
    let mut alphas = vec![state.alpha];
    let mut betas = vec![state.beta];
    let mut rhos = Vec::new();
    let mut thetas = Vec::new();
    let mut phis = Vec::new();
    let mut phi_bars = Vec::new();
    let mut v_nexts: Vec<Vec<f64>> = Vec::new();
    let mut local_orth: Vec<Option<f64>> = Vec::new();
    let mut iterates = Vec::new();
    if cfg.record_iterates {
        iterates.push(DenseVector::from_unchecked(map(&x)));
    }

    let mut termination = Termination::MaxIter;

    for k in 1..=cfg.max_iter {
        if phi_bar == 0.0 {
            termination = Termination::ResidualZero;
            break;
        }
        res_norms.push(phi_bar.abs());

        let step = golub_kahan_step(&state, op);
        let (beta_next, alpha_next, v_next) = match &step {
            GkStep::Next(next) => (next.beta, next.alpha, Some(&next.v)),
            GkStep::BetaZero => (0.0, 0.0, None),
            GkStep::AlphaZero { beta, .. } => (*beta, 0.0, None),
        };
        if !matches!(step, GkStep::BetaZero) {
            betas.push(beta_next);
        }
        if matches!(step, GkStep::Next(_)) {
            alphas.push(alpha_next);
        }

        let rho = (rho_bar * rho_bar + beta_next * beta_next).sqrt();
        let c = rho_bar / rho;
        let s = beta_next / rho;
        let theta_next = s * alpha_next;
        rho_bar = -c * alpha_next;
        let phi = c * phi_bar;
        phi_bar = s * phi_bar;

        axpy(phi / rho, &w, &mut x);

        if cfg.record_local_orthogonality {
            local_orth.push(v_next.map(|v| (theta_next / rho) * dot_slices(v, &w)));
        }

        rhos.push(rho);
        thetas.push(theta_next);
        phis.push(phi);
        phi_bars.push(phi_bar);
        if cfg.record_iterates {
            if let Some(v) = v_next {
                v_nexts.push(v.clone());
            }
        }

        let mapped = if cfg.record_iterates || cfg.stop_alpha > 0.0 || cfg.stop_beta > 0.0 {
            Some(map(&x))
        } else {
            None
        };
        let norm_x = mapped
            .as_deref()
            .map(norm2_slice)
            .unwrap_or_else(|| norm2_slice(&x));
        let stop = est.push(k - 1, phi * phi, norm_x)?;
        if cfg.record_iterates {
            iterates.push(DenseVector::from_unchecked(mapped.unwrap()));
        }

        match step {
            GkStep::Next(next) => {
                // w_{k+1} = v_{k+1} - (theta_{k+1} / rho_k) w_k; the
                // minus pairs with rho_bar_{k+1} = -c_k alpha_{k+1}
                // (a plus here makes the iterates leave the CGLS path
                // at step 2).
                let coeff = theta_next / rho;
                for i in 0..n {
                    w[i] = next.v[i] - coeff * w[i];
                }
                state = next;
            }
            GkStep::BetaZero | GkStep::AlphaZero { .. } => {
                termination = Termination::LuckyBreakdown;
                break;
            }
        }
        if let PushOutcome::Stop { ell, k: at } = stop {
            termination = Termination::EstimateStop { ell, k: at };
            break;
        }
    }

    let (deltas, events, clamped) = est.finish(&termination);
    let iterations = deltas.len();
    let final_x = DenseVector::from_unchecked(map(&x));
    let trace = SolverTrace {
        solver: kind,
        iterations,
        res_norms,
        deltas,
        events,
        local_orth,
        iterates,
        coeffs: CoeffLog::Lsqr {
            alpha: alphas,
            beta: betas,
            rho: rhos,
            theta: thetas,
            phi: phis,
            phi_bar: phi_bars,
            v_next: v_nexts,
        },
        termination,
        final_x: final_x.clone(),
        clamped_deltas: clamped,
    };
    Ok((final_x, trace))
}
