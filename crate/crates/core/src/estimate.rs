//! Adaptive lower-bound estimation of solver error norms.
//!
//! Each CG-like iteration contributes a nonnegative increment Delta_k
//! (gamma_k ||s_k||^2 for CGLS, phi_k^2 for LSQR, and so on) such that
//! the squared error at iteration ell telescopes as
//!
//! ```text
//!     err(ell)^2 = Delta_ell + ... + Delta_k + err(k+1)^2.
//! ```
//!
//! The partial sum `Delta_{ell:k}` is therefore a lower bound on
//! err(ell)^2, and it becomes an estimate of prescribed relative
//! accuracy tau once the remaining tail is small enough. The adaptive
//! rule watches the decay of the increments and accepts the bound for
//! index ell at the earliest iteration k where the projected tail,
//! S * Delta_k, is below tau relative to the accumulated sum. The delay
//! k - ell is chosen per index, not fixed in advance.
//!
//! Division guards: a zero denominator anywhere in the tests below is
//! treated as +infinity so the comparison fails and no estimate is
//! accepted on degenerate data.

use crate::error::{Error, Result};

pub const DEFAULT_TAU: f64 = 0.25;
pub const DEFAULT_TOL: f64 = 1e-4;

/// An accepted error estimate: at iteration `k` the sum
/// `Delta_{ell:k}` was accepted as an estimate of the squared error at
/// iteration `ell`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimateEvent {
    pub ell: usize,
    pub k: usize,
    pub estimate: f64,
    pub delay: usize,
}

/// Ratio with the zero-denominator convention of this module.
#[inline]
pub(crate) fn guarded_ratio(num: f64, den: f64) -> f64 {
    if den == 0.0 {
        f64::INFINITY
    } else {
        num / den
    }
}

/// Estimator state: the stored increments, the cached partial sums
/// `Delta_{j:k}` (current and previous iteration), and the lower index
/// `ell` of the next estimate to emit.
#[derive(Debug, Clone)]
pub struct DeltaBuffer {
    deltas: Vec<f64>,
    /// tail_cur[j] = Delta_j + ... + Delta_k, accumulated left to right.
    tail_cur: Vec<f64>,
    /// tail_prev[j] = Delta_j + ... + Delta_{k-1}.
    tail_prev: Vec<f64>,
    ell: usize,
    tau: f64,
    tol: f64,
    clamped: usize,
}

impl DeltaBuffer {
    pub fn new(tau: f64, tol: f64) -> Result<Self> {
        if !(tau > 0.0 && tau < 1.0) {
            return Err(Error::InvalidParam(format!(
                "tau must lie in (0, 1), got {tau}"
            )));
        }
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(Error::InvalidParam(format!(
                "TOL must be positive and finite, got {tol}"
            )));
        }
        Ok(DeltaBuffer {
            deltas: Vec::new(),
            tail_cur: Vec::new(),
            tail_prev: Vec::new(),
            ell: 0,
            tau,
            tol,
            clamped: 0,
        })
    }

    pub fn with_defaults() -> Self {
        Self::new(DEFAULT_TAU, DEFAULT_TOL).expect("default parameters are valid")
    }

    pub fn len(&self) -> usize {
        self.deltas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.deltas.is_empty()
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn deltas(&self) -> &[f64] {
        &self.deltas
    }

    /// Number of negative increments clamped to zero so far.
    pub fn clamped_count(&self) -> usize {
        self.clamped
    }

    /// Append the increment of iteration `k` and run the adaptive
    /// acceptance rule, returning the estimates it emits (possibly
    /// none, possibly several).
    ///
    /// A negative increment — possible in finite precision near the
    /// accuracy plateau — is clamped to zero and counted.
    pub fn push_delta(&mut self, k: usize, delta_k: f64) -> Result<Vec<EstimateEvent>> {
        if k != self.deltas.len() {
            return Err(Error::InvalidParam(format!(
                "non-consecutive push: expected iteration {}, got {k}",
                self.deltas.len()
            )));
        }
        if delta_k.is_nan() {
            return Err(Error::NonFinite {
                what: "push_delta",
            });
        }
        let delta_k = if delta_k < 0.0 {
            self.clamped += 1;
            0.0
        } else {
            delta_k
        };

        self.deltas.push(delta_k);
        // Advance the cached sums: tail_prev ends at k-1, tail_cur at k.
        std::mem::swap(&mut self.tail_prev, &mut self.tail_cur);
        self.tail_cur.clone_from(&self.tail_prev);
        for s in self.tail_cur.iter_mut() {
            *s += delta_k;
        }
        self.tail_cur.push(delta_k);

        // Largest m < k whose sum still dwarfs the tail from ell;
        // indices before it carry no information about current decay.
        let mut m = 0;
        for j in (0..k).rev() {
            if guarded_ratio(self.tail_cur[self.ell], self.tail_cur[j]) <= self.tol {
                m = j;
                break;
            }
        }

        // Worst observed ratio of a remaining sum to its first term:
        // the projected bound on how much the future can still add.
        let mut s_factor = 0.0f64;
        for j in m..k {
            let r = guarded_ratio(self.tail_cur[j], self.deltas[j]);
            if r > s_factor {
                s_factor = r;
            }
        }

        let mut events = Vec::new();
        while self.ell < k
            && guarded_ratio(s_factor * delta_k, self.tail_prev[self.ell]) <= self.tau
        {
            events.push(EstimateEvent {
                ell: self.ell,
                k,
                estimate: self.tail_cur[self.ell],
                delay: k - self.ell,
            });
            self.ell += 1;
        }
        Ok(events)
    }

    /// Sum Delta_ell + ... + Delta_k.
    pub fn lower_bound(&self, ell: usize, k: usize) -> Result<f64> {
        if ell > k || k >= self.deltas.len() {
            return Err(Error::InvalidParam(format!(
                "range [{ell}, {k}] outside pushed iterations 0..{}",
                self.deltas.len()
            )));
        }
        let mut acc = 0.0;
        for j in ell..=k {
            acc += self.deltas[j];
        }
        Ok(acc)
    }

    /// Flush on exact convergence: once the solver has hit a zero
    /// residual (or a lucky breakdown), the remaining error is exactly
    /// zero and every pending index gets its full tail sum, which at
    /// that point telescopes to the true squared error. Consumes the
    /// buffer; not part of the incremental acceptance rule.
    pub fn finalize_exact(self) -> Vec<EstimateEvent> {
        let mut events = Vec::new();
        if self.deltas.is_empty() {
            return events;
        }
        let k = self.deltas.len() - 1;
        for ell in self.ell..=k {
            events.push(EstimateEvent {
                ell,
                k,
                estimate: self.tail_cur[ell],
                delay: k - ell,
            });
        }
        events
    }
}

/// Upper bound companion of an accepted estimate: estimate / (1 - tau).
pub fn upper_bound(estimate: f64, tau: f64) -> Result<f64> {
    if !(tau > 0.0 && tau < 1.0) {
        return Err(Error::InvalidParam(format!(
            "tau must lie in (0, 1), got {tau}"
        )));
    }
    Ok(estimate / (1.0 - tau))
}

/// Stopping test: estimate <= alpha * ||A|| * ||x_k|| + beta * ||b||,
/// with the estimate playing the role of the squared energy error and
/// the right-hand side unsquared, exactly as the criterion is stated.
pub fn check_stopping(
    estimate: f64,
    norm_a: f64,
    norm_xk: f64,
    norm_b: f64,
    alpha: f64,
    beta: f64,
) -> bool {
    estimate <= alpha * norm_a * norm_xk + beta * norm_b
}
