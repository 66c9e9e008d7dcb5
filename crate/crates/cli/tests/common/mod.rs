//! Shared helpers for the acceptance and CLI test suites.

use krylest::oracle::detect_plateau;
use krylest::rng::SplitMix64;
use krylest::{DenseVector, EstimateEvent, SparseMatrix};
use std::path::PathBuf;

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

/// Iteration budget that keeps a scored run above the depth where
/// finite precision degrades the checked quantity: stop once the
/// squared error has dropped below depth_rel of its start (or to
/// within 1e6 of the floor, when the probe actually reached it), and
/// in any case before 85% of the detected plateau. The equivalence and
/// identity checks need shallower cutoffs than the lower-bound checks
/// because their divergence grows like eps * E_0 / E_k.
pub fn safe_budget_rel(probe_errs: &[f64], depth_rel: f64) -> usize {
    let e0 = probe_errs[0];
    let plateau = detect_plateau(probe_errs);
    let mut cutoff = depth_rel * e0;
    if plateau < probe_errs.len() {
        let floor = probe_errs.iter().copied().fold(f64::INFINITY, f64::min);
        cutoff = cutoff.max(1e6 * floor);
    }
    // position() names the first iterate at or below the cutoff; stop
    // one short so the final scored iterate stays strictly above it
    // (steep superlinear plunges can cross many orders in one step).
    let depth = probe_errs
        .iter()
        .position(|&e| e <= cutoff)
        .unwrap_or(probe_errs.len())
        .saturating_sub(1);
    depth.min(plateau * 85 / 100).max(1)
}

/// Default depth for the estimator lower-bound/accuracy suite.
pub fn safe_budget(probe_errs: &[f64]) -> usize {
    safe_budget_rel(probe_errs, 1e-18)
}

/// Events inside the estimator's guarantee: both the target index and
/// the acceptance iteration lie before the attainable-accuracy plateau.
pub fn gated_events<'a>(
    events: &'a [EstimateEvent],
    plateau: usize,
) -> impl Iterator<Item = &'a EstimateEvent> {
    events
        .iter()
        .filter(move |ev| ev.ell < plateau && ev.k < plateau)
}

/// The synthetic least-norm roster: 48 wide consistent instances of
/// varied size and conditioning.
pub fn least_norm_instances() -> Vec<(SparseMatrix, DenseVector, String)> {
    let mut out = Vec::new();
    for idx in 0..48u64 {
        let m = 40 + 4 * (idx as usize % 8);
        let n = 2 * m + (idx as usize % 5) * 7;
        let scale = [2.0, 4.0, 6.0, 8.0, 12.0, 15.0, 20.0, 25.0][idx as usize % 8];
        let tall = krylest::synthetic::sparse_scaled_random(n, m, 5, scale, 555 + idx);
        let a = tall.transpose();
        let inst = krylest::generate_rhs(&a, krylest::ProblemKind::LeastNorm, 900 + idx).unwrap();
        out.push((inst.matrix, inst.rhs, format!("ln{idx}({m}x{n},s{scale})")));
    }
    out
}

/// Well-conditioned dense equivalence instances (m, n <= 50,
/// cond(A) <= 100); `wide` flips to least-norm shape with a consistent
/// right-hand side.
///
/// The small dimension and mild conditioning are deliberate: the CG
/// iterate map amplifies any rounding perturbation by ~cond(A) per
/// iteration (a one-ulp change of b produces the same growth), so a
/// pointwise 1e-10 agreement between two equivalent algorithms is
/// meaningful only while cond(A)^k stays a few orders above machine
/// precision. Short runs still exercise every recurrence line.
pub fn equivalence_instance(seed: u64, wide: bool) -> (SparseMatrix, DenseVector) {
    let mut rng = SplitMix64::new(7000 + seed);
    let big = 14 + rng.next_index(37); // 14..=50
    let small = 4 + rng.next_index(7); // 4..=10
    let cond = 3.0 + 3.0 * rng.next_f64(); // 3..6
    let (m, n) = if wide { (small, big) } else { (big, small) };
    let a = krylest::synthetic::svd_matrix(m, n, cond, 8100 + seed);
    let b = if wide {
        // Consistent RHS for least-norm solvers.
        let x_gen = krylest::generating_solution(n);
        krylest::mat_vec(&a, &x_gen).unwrap()
    } else {
        let mut bv = vec![0.0; m];
        rng.fill_normal(&mut bv);
        DenseVector::new(bv).unwrap()
    };
    (a, b)
}

/// Literal from-scratch re-execution of the adaptive acceptance rule
/// over a full increment sequence; all sums are direct left-to-right
/// loops, independent of the DeltaBuffer internals.
pub fn replay_adaptive(deltas: &[f64], tau: f64, tol: f64) -> Vec<EstimateEvent> {
    let sum = |from: usize, to_incl: usize| -> f64 {
        let mut acc = 0.0;
        for j in from..=to_incl {
            acc += deltas[j];
        }
        acc
    };
    let ratio = |num: f64, den: f64| -> f64 {
        if den == 0.0 {
            f64::INFINITY
        } else {
            num / den
        }
    };
    let mut events = Vec::new();
    let mut ell = 0usize;
    for k in 0..deltas.len() {
        let mut m = 0;
        for j in (0..k).rev() {
            if ratio(sum(ell, k), sum(j, k)) <= tol {
                m = j;
                break;
            }
        }
        let mut s_factor = 0.0f64;
        for j in m..k {
            let r = ratio(sum(j, k), deltas[j]);
            if r > s_factor {
                s_factor = r;
            }
        }
        while ell < k && ratio(s_factor * deltas[k], sum(ell, k - 1)) <= tau {
            events.push(EstimateEvent {
                ell,
                k,
                estimate: sum(ell, k),
                delay: k - ell,
            });
            ell += 1;
        }
    }
    events
}

/// Euclidean distance between two iterates.
pub fn iterate_distance(x: &DenseVector, y: &DenseVector) -> f64 {
    x.as_slice()
        .iter()
        .zip(y.as_slice())
        .map(|(p, q)| (p - q) * (p - q))
        .sum::<f64>()
        .sqrt()
}
