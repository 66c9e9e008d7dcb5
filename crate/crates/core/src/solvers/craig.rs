//! CRAIG: Craig's method on the bidiagonalization, for consistent
//! least-norm problems. The iterate update x_k = x_{k-1} + zeta_k v_k
//! minimizes the Euclidean error over the growing Krylov space; the
//! increment zeta_k^2 drains the squared Euclidean error from iterate
//! k - 1 to k and is stored under buffer index k - 1.

use super::bidiag::{golub_kahan_step, BidiagState, GkStep};
use super::{
    CoeffLog, EstimatorRun, LinearOperator, PushOutcome, SolverConfig, SolverKind, SolverTrace,
    Termination,
};
use crate::error::{Error, Result};
use crate::sparse::SparseMatrix;
use crate::vector::{axpy, norm2_slice, DenseVector};

/// Solve the least-norm problem; optionally also return the y iterate
/// of the underlying AA'y = b system.
pub fn craig_solve(
    a: &SparseMatrix,
    b: &DenseVector,
    cfg: &SolverConfig,
    want_y: bool,
) -> Result<(DenseVector, Option<DenseVector>, SolverTrace)> {
    craig_core(
        a,
        b.as_slice(),
        cfg,
        SolverKind::Craig,
        want_y,
        a.frobenius_norm(),
        norm2_slice(b.as_slice()),
    )
}

pub(crate) fn craig_core(
    op: &dyn LinearOperator,
    b: &[f64],
    cfg: &SolverConfig,
    kind: SolverKind,
    want_y: bool,
    norm_a: f64,
    norm_b: f64,
) -> Result<(DenseVector, Option<DenseVector>, SolverTrace)> {
    cfg.validate()?;
    if b.len() != op.rows() {
        return Err(Error::DimensionMismatch {
            what: "craig rhs",
            expected: op.rows(),
            got: b.len(),
        });
    }
    let (m, n) = (op.rows(), op.cols());

    let mut state = BidiagState::init(op, b)?;
    let mut x = vec![0.0; n];
    let mut zeta = -1.0_f64;
    let mut d = vec![0.0; m];
    let mut y = vec![0.0; m];

    let mut est = EstimatorRun::new(cfg, norm_a, norm_b)?;
    let mut res_norms = Vec::new();
    let mut alphas = vec![state.alpha];
    let mut betas = vec![state.beta];
    let mut zetas = Vec::new();
    let mut iterates = Vec::new();
    if cfg.record_iterates {
        iterates.push(DenseVector::zeros(n));
    }

    let mut termination = Termination::MaxIter;

    for k in 1..=cfg.max_iter {
        // ||r_{k-1}|| = |zeta_{k-1}| beta_k (with zeta_0 = -1 giving
        // ||r_0|| = beta_1 = ||b||).
        res_norms.push(zeta.abs() * state.beta);

        zeta = -(state.beta / state.alpha) * zeta;
        axpy(zeta, &state.v, &mut x);
        if want_y {
            for i in 0..m {
                d[i] = (state.u[i] - state.beta * d[i]) / state.alpha;
            }
            axpy(zeta, &d, &mut y);
        }
        zetas.push(zeta);
        let stop = est.push(k - 1, zeta * zeta, norm2_slice(&x))?;
        if cfg.record_iterates {
            iterates.push(DenseVector::from_unchecked(x.clone()));
        }

        match golub_kahan_step(&state, op) {
            GkStep::Next(next) => {
                betas.push(next.beta);
                alphas.push(next.alpha);
                state = next;
            }
            GkStep::BetaZero => {
                // r_k = -zeta_k beta_{k+1} u_{k+1} = 0: exact solution.
                termination = Termination::LuckyBreakdown;
                break;
            }
            GkStep::AlphaZero { .. } => {
                return Err(Error::Breakdown {
                    solver: kind.name(),
                    msg: format!(
                        "alpha_{} = 0: Krylov space exhausted with nonzero residual (is b in the range of A?)",
                        k + 1
                    ),
                });
            }
        }
        if let PushOutcome::Stop { ell, k: at } = stop {
            termination = Termination::EstimateStop { ell, k: at };
            break;
        }
    }

    let (deltas, events, clamped) = est.finish(&termination);
    let iterations = deltas.len();
    let final_x = DenseVector::from_unchecked(x);
    let trace = SolverTrace {
        solver: kind,
        iterations,
        res_norms,
        deltas,
        events,
        local_orth: Vec::new(),
        iterates,
        coeffs: CoeffLog::Craig {
            alpha: alphas,
            beta: betas,
            zeta: zetas,
        },
        termination,
        final_x: final_x.clone(),
        clamped_deltas: clamped,
    };
    let y_out = want_y.then(|| DenseVector::from_unchecked(y));
    Ok((final_x, y_out, trace))
}
