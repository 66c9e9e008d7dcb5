//! Property tests for the library invariants: kernel adjointness,
//! Matrix Market round-trips, estimator replay equivalence, and
//! ideal-delay monotonicity.

use krylest::estimate::{DeltaBuffer, EstimateEvent};
use krylest::oracle::{ideal_delay, IdealDelay};
use krylest::{load_matrix_market, write_matrix_market, DenseVector, SparseMatrix};
use proptest::prelude::*;

/// Random sparse matrix strategy: dims up to 12 x 10, each entry
/// present with probability ~0.4.
fn sparse_matrix_strategy() -> impl Strategy<Value = SparseMatrix> {
    (1usize..12, 1usize..10).prop_flat_map(|(m, n)| {
        proptest::collection::vec(
            (any::<bool>(), -100.0f64..100.0),
            m * n,
        )
        .prop_map(move |cells| {
            let mut triplets = Vec::new();
            for (idx, (keep, v)) in cells.into_iter().enumerate() {
                if keep {
                    triplets.push((idx / n, idx % n, v));
                }
            }
            SparseMatrix::from_triplets(m, n, &triplets).unwrap()
        })
    })
}

proptest! {
    /// dot(Av, u) = dot(v, A'u) up to rounding scaled by the data.
    #[test]
    fn adjointness(
        a in sparse_matrix_strategy(),
        seed in 0u64..1_000_000,
    ) {
        let mut rng = krylest::rng::SplitMix64::new(seed);
        let mut v = vec![0.0; a.cols()];
        let mut u = vec![0.0; a.rows()];
        rng.fill_normal(&mut v);
        rng.fill_normal(&mut u);
        let v = DenseVector::new(v).unwrap();
        let u = DenseVector::new(u).unwrap();

        let av = krylest::mat_vec(&a, &v).unwrap();
        let atu = krylest::mat_vec_transpose(&a, &u).unwrap();
        let lhs = krylest::dot(&av, &u).unwrap();
        let rhs = krylest::dot(&v, &atu).unwrap();
        let bound = 1e-12
            * a.frobenius_norm().max(1.0)
            * krylest::norm2(&u).max(1.0)
            * krylest::norm2(&v).max(1.0);
        prop_assert!((lhs - rhs).abs() <= bound, "{lhs} vs {rhs}");
    }

    /// write -> load -> write -> load is the identity on the CSR triple.
    #[test]
    fn matrix_market_roundtrip(a in sparse_matrix_strategy()) {
        let dir = std::env::temp_dir().join("krylest-prop-tests");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join(format!("rt-{}.mtx", std::process::id()));
        write_matrix_market(&path, &a, &[]).unwrap();
        let b = load_matrix_market(&path).unwrap();
        prop_assert_eq!(a.row_ptr(), b.row_ptr());
        prop_assert_eq!(a.col_idx(), b.col_idx());
        prop_assert_eq!(a.values(), b.values());

        let path2 = dir.join(format!("rt2-{}.mtx", std::process::id()));
        write_matrix_market(&path2, &b, &[]).unwrap();
        let c = load_matrix_market(&path2).unwrap();
        prop_assert_eq!(&b, &c);
    }

    /// Incremental push_delta equals a from-scratch re-execution of the
    /// adaptive rule at every step.
    #[test]
    fn estimator_replay_equivalence(
        raw in proptest::collection::vec(0.0f64..10.0, 1..60),
        decay in 0.3f64..0.99,
    ) {
        // Mix a decaying envelope into the raw values so events fire.
        let deltas: Vec<f64> = raw
            .iter()
            .enumerate()
            .map(|(j, &v)| v * decay.powi(j as i32))
            .collect();
        let mut buf = DeltaBuffer::with_defaults();
        let mut incremental = Vec::new();
        for (k, &d) in deltas.iter().enumerate() {
            incremental.extend(buf.push_delta(k, d).unwrap());
        }
        let replayed = replay_adaptive(&deltas, 0.25, 1e-4);
        prop_assert_eq!(incremental, replayed);
    }

    /// Extending a trajectory never changes an already-finite ideal delay.
    #[test]
    fn ideal_delay_truncation_monotone(
        errs in proptest::collection::vec(1e-8f64..1.0, 12..40),
        cut in 6usize..11,
    ) {
        // Sort descending so the sequence looks like an error history.
        let mut errs = errs;
        errs.sort_by(|a, b| b.partial_cmp(a).unwrap());
        let full = ideal_delay(&errs, 0.25).unwrap();
        let prefix = ideal_delay(&errs[..cut], 0.25).unwrap();
        for ell in 0..cut {
            if let IdealDelay::Finite(d) = prefix[ell] {
                prop_assert_eq!(IdealDelay::Finite(d), full[ell]);
            }
        }
    }
}

/// Literal from-scratch re-execution of the adaptive acceptance rule;
/// all sums are direct left-to-right loops. Kept independent of the
/// DeltaBuffer internals.
fn replay_adaptive(deltas: &[f64], tau: f64, tol: f64) -> Vec<EstimateEvent> {
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
