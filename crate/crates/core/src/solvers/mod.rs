//! CG-like solvers instrumented with the adaptive error estimator.
//!
//! Five algorithms share the iteration/trace machinery here: plain CG
//! (the estimator's reference host), CGLS and LSQR for least-squares
//! problems, CGNE and CRAIG for least-norm problems. The preconditioned
//! variants live in [`crate::precond`] and reuse the bidiagonalization
//! kernel through the [`LinearOperator`] trait.

mod bidiag;
mod cg;
mod cgls;
mod cgne;
mod craig;
mod lsqr;

pub use bidiag::{golub_kahan_step, BidiagState, GkStep};
pub use cg::cg_solve;
pub use cgls::cgls_solve;
pub use cgne::cgne_solve;
pub use craig::craig_solve;
pub use lsqr::lsqr_solve;

pub(crate) use craig::craig_core;
pub(crate) use lsqr::lsqr_core;

use crate::error::{Error, Result};
use crate::estimate::{check_stopping, DeltaBuffer, EstimateEvent};
use crate::sparse::SparseMatrix;
use crate::vector::DenseVector;

/// Anything that can apply A and A' without materializing either.
pub trait LinearOperator {
    fn rows(&self) -> usize;
    fn cols(&self) -> usize;
    /// out = A v
    fn apply_into(&self, v: &[f64], out: &mut [f64]);
    /// out = A' u
    fn apply_transpose_into(&self, u: &[f64], out: &mut [f64]);
}

impl LinearOperator for SparseMatrix {
    fn rows(&self) -> usize {
        SparseMatrix::rows(self)
    }
    fn cols(&self) -> usize {
        SparseMatrix::cols(self)
    }
    fn apply_into(&self, v: &[f64], out: &mut [f64]) {
        self.mat_vec_into(v, out);
    }
    fn apply_transpose_into(&self, u: &[f64], out: &mut [f64]) {
        self.mat_vec_transpose_into(u, out);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverKind {
    Cg,
    Cgls,
    Lsqr,
    Cgne,
    Craig,
    Pcgls,
    Plsqr,
    Pcgne,
    Pcraig,
}

impl SolverKind {
    pub fn name(&self) -> &'static str {
        match self {
            SolverKind::Cg => "cg",
            SolverKind::Cgls => "cgls",
            SolverKind::Lsqr => "lsqr",
            SolverKind::Cgne => "cgne",
            SolverKind::Craig => "craig",
            SolverKind::Pcgls => "pcgls",
            SolverKind::Plsqr => "plsqr",
            SolverKind::Pcgne => "pcgne",
            SolverKind::Pcraig => "pcraig",
        }
    }
}

/// Per-solve configuration. `tau` drives the estimator's relative
/// accuracy, `tol_est` its inner safety parameter; `stop_alpha` and
/// `stop_beta` feed the estimate-based stopping test (both zero
/// disables it except at exact convergence).
#[derive(Debug, Clone)]
pub struct SolverConfig {
    pub max_iter: usize,
    pub tau: f64,
    pub tol_est: f64,
    pub stop_alpha: f64,
    pub stop_beta: f64,
    pub record_local_orthogonality: bool,
    /// Store every iterate (and for bidiagonalization solvers the v
    /// vectors) in the trace so a ground-truth engine can recompute
    /// error trajectories and identities offline.
    pub record_iterates: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            max_iter: 1000,
            tau: crate::estimate::DEFAULT_TAU,
            tol_est: crate::estimate::DEFAULT_TOL,
            stop_alpha: 0.0,
            stop_beta: 0.0,
            record_local_orthogonality: false,
            record_iterates: false,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_iter == 0 {
            return Err(Error::InvalidParam("max_iter must be at least 1".into()));
        }
        if !(self.tau > 0.0 && self.tau < 1.0) {
            return Err(Error::InvalidParam(format!(
                "tau must lie in (0, 1), got {}",
                self.tau
            )));
        }
        if self.stop_alpha < 0.0 || self.stop_beta < 0.0 {
            return Err(Error::InvalidParam(
                "stopping tolerances must be nonnegative".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    MaxIter,
    /// The iteration residual (or normal-equations residual) vanished.
    ResidualZero,
    /// A bidiagonalization coefficient vanished with the Krylov space
    /// invariant: the computed iterate is exact.
    LuckyBreakdown,
    /// The estimate-based stopping criterion fired for iterate `ell`.
    EstimateStop { ell: usize, k: usize },
}

impl Termination {
    /// Exact-solution terminations flush the estimator buffer: the
    /// remaining error is identically zero.
    pub fn is_exact(&self) -> bool {
        matches!(self, Termination::ResidualZero | Termination::LuckyBreakdown)
    }
}

/// Per-solver coefficient streams, recorded at full precision so that
/// identities between the algorithms can be replayed offline.
#[derive(Debug, Clone)]
pub enum CoeffLog {
    Cg {
        gamma: Vec<f64>,
        res_sq: Vec<f64>,
    },
    Cgls {
        gamma: Vec<f64>,
        s_norm_sq: Vec<f64>,
    },
    /// Entry i belongs to bidiagonalization step k = i + 1:
    /// `alpha[i]` = alpha_{i+1}, `beta[i]` = beta_{i+1} (so the init
    /// coefficients sit at i = 0), `rho[i]` = rho_{i+1},
    /// `theta[i]` = theta_{i+2}, `phi[i]` = phi_{i+1},
    /// `phi_bar[i]` = phi_bar_{i+2}, and `v_next[i]` = v_{i+2} when
    /// iterate recording is on.
    Lsqr {
        alpha: Vec<f64>,
        beta: Vec<f64>,
        rho: Vec<f64>,
        theta: Vec<f64>,
        phi: Vec<f64>,
        phi_bar: Vec<f64>,
        v_next: Vec<Vec<f64>>,
    },
    Cgne {
        gamma: Vec<f64>,
        r_norm_sq: Vec<f64>,
    },
    /// `alpha[i]` = alpha_{i+1}, `beta[i]` = beta_{i+1},
    /// `zeta[i]` = zeta_{i+1}.
    Craig {
        alpha: Vec<f64>,
        beta: Vec<f64>,
        zeta: Vec<f64>,
    },
}

/// Everything observable about one solve. Indexing convention: entry j
/// of the per-iteration vectors belongs to the estimator buffer index
/// j, i.e. the increment that drains the error from iterate j to
/// iterate j + 1 (for the bidiagonalization solvers that increment is
/// computed during step j + 1).
#[derive(Debug, Clone)]
pub struct SolverTrace {
    pub solver: SolverKind,
    /// Number of estimator increments pushed.
    pub iterations: usize,
    /// ||r_j|| at iterate j (recurred residual norm for LSQR/CRAIG;
    /// preconditioned residual for the preconditioned variants).
    pub res_norms: Vec<f64>,
    /// Clamped increments in buffer order.
    pub deltas: Vec<f64>,
    pub events: Vec<EstimateEvent>,
    /// Local-orthogonality scalar observed in the pass that pushed
    /// increment j; None where it is not defined or not recorded.
    pub local_orth: Vec<Option<f64>>,
    /// x_0 ..= x_iterations when iterate recording is on, else empty.
    pub iterates: Vec<DenseVector>,
    pub coeffs: CoeffLog,
    pub termination: Termination,
    pub final_x: DenseVector,
    /// Negative increments clamped to zero by the estimator.
    pub clamped_deltas: usize,
}

impl SolverTrace {
    /// The accepted estimate targeting iterate `ell`, if any.
    pub fn estimate_for(&self, ell: usize) -> Option<&EstimateEvent> {
        self.events.iter().find(|e| e.ell == ell)
    }
}

/// Shared estimator plumbing: pushes increments, collects events, and
/// evaluates the stopping criterion against each accepted estimate.
pub(crate) struct EstimatorRun {
    buf: DeltaBuffer,
    events: Vec<EstimateEvent>,
    stop_alpha: f64,
    stop_beta: f64,
    norm_a: f64,
    norm_b: f64,
}

pub(crate) enum PushOutcome {
    Continue,
    Stop { ell: usize, k: usize },
}

impl EstimatorRun {
    pub fn new(cfg: &SolverConfig, norm_a: f64, norm_b: f64) -> Result<Self> {
        Ok(EstimatorRun {
            buf: DeltaBuffer::new(cfg.tau, cfg.tol_est)?,
            events: Vec::new(),
            stop_alpha: cfg.stop_alpha,
            stop_beta: cfg.stop_beta,
            norm_a,
            norm_b,
        })
    }

    pub fn push(&mut self, k: usize, delta: f64, norm_xk: f64) -> Result<PushOutcome> {
        let new_events = self.buf.push_delta(k, delta)?;
        let mut outcome = PushOutcome::Continue;
        for ev in &new_events {
            if matches!(outcome, PushOutcome::Continue)
                && check_stopping(
                    ev.estimate,
                    self.norm_a,
                    norm_xk,
                    self.norm_b,
                    self.stop_alpha,
                    self.stop_beta,
                )
            {
                outcome = PushOutcome::Stop { ell: ev.ell, k: ev.k };
            }
        }
        self.events.extend(new_events);
        Ok(outcome)
    }

    /// Finish the run; flushes pending indices on exact convergence.
    pub fn finish(mut self, termination: &Termination) -> (Vec<f64>, Vec<EstimateEvent>, usize) {
        let deltas = self.buf.deltas().to_vec();
        let clamped = self.buf.clamped_count();
        if termination.is_exact() {
            self.events.extend(self.buf.finalize_exact());
        }
        (deltas, self.events, clamped)
    }
}
