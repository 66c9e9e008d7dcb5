//! Golub-Kahan bidiagonalization kernel shared by LSQR and CRAIG (and
//! their preconditioned variants through operator composition).
//!
//! The recurrences are
//!
//! ```text
//!     beta_1 u_1 = b,            alpha_1 v_1 = A' u_1,
//!     beta_{k+1} u_{k+1} = A v_k     - alpha_k u_k,
//!     alpha_{k+1} v_{k+1} = A' u_{k+1} - beta_{k+1} v_k,
//! ```
//!
//! with alpha_k, beta_k >= 0 chosen so that every u_k and v_k has unit
//! norm. A vanishing coefficient means the Krylov space became
//! invariant; that is surfaced as a tagged step outcome, and the caller
//! decides whether it is a lucky breakdown or an error.

use super::LinearOperator;
use crate::error::{Error, Result};
use crate::vector::{axpy, norm2_slice, scale};

/// State after step k: the scalars alpha_k, beta_k and the unit
/// vectors u_k, v_k.
#[derive(Debug, Clone)]
pub struct BidiagState {
    pub k: usize,
    pub alpha: f64,
    pub beta: f64,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
}

/// Outcome of one bidiagonalization step.
#[derive(Debug, Clone)]
pub enum GkStep {
    Next(BidiagState),
    /// beta_{k+1} = 0: A v_k lies in span(u_k).
    BetaZero,
    /// alpha_{k+1} = 0 (with beta_{k+1} > 0 and u_{k+1} formed).
    AlphaZero { beta: f64, u: Vec<f64> },
}

/// A normalization coefficient this small relative to the local
/// coefficient scale is a breakdown: the subtraction that produced the
/// vector cancelled to rounding noise, so the Krylov space is
/// numerically invariant. An exact-zero test would miss this on
/// instances where exact arithmetic does break down (A = I being the
/// canonical case).
const BREAKDOWN_RTOL: f64 = 1e-14;

impl BidiagState {
    /// Run the initialization lines: beta_1 u_1 = b, alpha_1 v_1 = A'u_1.
    /// Fails on b = 0 or alpha_1 = 0 (nothing to iterate on).
    pub fn init(op: &dyn LinearOperator, b: &[f64]) -> Result<Self> {
        if b.len() != op.rows() {
            return Err(Error::DimensionMismatch {
                what: "BidiagState::init",
                expected: op.rows(),
                got: b.len(),
            });
        }
        let beta = norm2_slice(b);
        if beta == 0.0 {
            return Err(Error::Breakdown {
                solver: "bidiag",
                msg: "right-hand side is zero".into(),
            });
        }
        let mut u = b.to_vec();
        scale(1.0 / beta, &mut u);
        let mut v = vec![0.0; op.cols()];
        op.apply_transpose_into(&u, &mut v);
        let alpha = norm2_slice(&v);
        if alpha == 0.0 {
            return Err(Error::Breakdown {
                solver: "bidiag",
                msg: "A'u_1 = 0: b is orthogonal to the range of A".into(),
            });
        }
        scale(1.0 / alpha, &mut v);
        Ok(BidiagState {
            k: 1,
            alpha,
            beta,
            u,
            v,
        })
    }
}

/// Advance the bidiagonalization by one step.
pub fn golub_kahan_step(state: &BidiagState, op: &dyn LinearOperator) -> GkStep {
    let local_scale = state.alpha + state.beta;
    let mut u_next = vec![0.0; op.rows()];
    op.apply_into(&state.v, &mut u_next);
    axpy(-state.alpha, &state.u, &mut u_next);
    let beta_next = norm2_slice(&u_next);
    if beta_next <= BREAKDOWN_RTOL * local_scale {
        return GkStep::BetaZero;
    }
    scale(1.0 / beta_next, &mut u_next);

    let mut v_next = vec![0.0; op.cols()];
    op.apply_transpose_into(&u_next, &mut v_next);
    axpy(-beta_next, &state.v, &mut v_next);
    let alpha_next = norm2_slice(&v_next);
    if alpha_next <= BREAKDOWN_RTOL * (local_scale + beta_next) {
        return GkStep::AlphaZero {
            beta: beta_next,
            u: u_next,
        };
    }
    scale(1.0 / alpha_next, &mut v_next);
    GkStep::Next(BidiagState {
        k: state.k + 1,
        alpha: alpha_next,
        beta: beta_next,
        u: u_next,
        v: v_next,
    })
}
