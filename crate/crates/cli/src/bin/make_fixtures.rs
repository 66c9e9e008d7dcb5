//! Regenerates the bundled test fixtures under fixtures/.
//!
//! The four fixtures mirror the dimensions and character of the
//! classic gravity-meter least-squares collection pairs: tall sparse
//! matrices, ~5 nonzeros per row, a well-conditioned and an
//! ill-conditioned variant per size, differing in the strength of the
//! geometric column scaling. Each matrix ships with a bundled
//! least-squares RHS: the alternating-signs generating solution plus
//! Gaussian noise of norm comparable to ||b_LN|| (seeded per matrix),
//! so every byte of the fixtures is reproducible from this program.
//!
//! Usage: make_fixtures [output-dir]   (default: fixtures/)

use krylest::oracle::singular_extent;
use krylest::rng::SplitMix64;
use krylest::synthetic::sparse_scaled_random;
use krylest::{
    generating_solution, mat_vec, write_matrix_market, write_vector_market, DenseVector,
    SparseMatrix,
};
use std::path::PathBuf;

struct FixtureSpec {
    name: &'static str,
    rows: usize,
    cols: usize,
    per_row: usize,
    cond_scale: f64,
    matrix_seed: u64,
    rhs_seed: u64,
}

const FIXTURES: &[FixtureSpec] = &[
    FixtureSpec {
        name: "well1033",
        rows: 1033,
        cols: 320,
        per_row: 5,
        cond_scale: 30.0,
        matrix_seed: 103301,
        rhs_seed: 1,
    },
    FixtureSpec {
        name: "illc1033",
        rows: 1033,
        cols: 320,
        per_row: 5,
        cond_scale: 120.0,
        matrix_seed: 103302,
        rhs_seed: 2,
    },
    FixtureSpec {
        name: "well1850",
        rows: 1850,
        cols: 712,
        per_row: 5,
        cond_scale: 25.0,
        matrix_seed: 185001,
        rhs_seed: 3,
    },
    FixtureSpec {
        name: "illc1850",
        rows: 1850,
        cols: 712,
        per_row: 5,
        cond_scale: 150.0,
        matrix_seed: 185002,
        rhs_seed: 4,
    },
];

/// Bundled RHS: b_LN = A x_gen plus Gaussian noise scaled to
/// ||b_LN|| / sqrt(m), i.e. noise of norm comparable to the signal.
fn bundled_rhs(a: &SparseMatrix, seed: u64) -> DenseVector {
    let x_gen = generating_solution(a.cols());
    let b_ln = mat_vec(a, &x_gen).unwrap();
    let norm = krylest::norm2(&b_ln);
    let scale = norm / (a.rows() as f64).sqrt();
    let mut rng = SplitMix64::new(seed);
    let mut b = b_ln.into_vec();
    for bi in b.iter_mut() {
        *bi += rng.next_normal() * scale;
    }
    DenseVector::new(b).unwrap()
}

fn main() {
    let out_dir = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("fixtures"));
    std::fs::create_dir_all(&out_dir).expect("create output dir");

    for spec in FIXTURES {
        let a = sparse_scaled_random(
            spec.rows,
            spec.cols,
            spec.per_row,
            spec.cond_scale,
            spec.matrix_seed,
        );
        let (sigma_max, sigma_min) = singular_extent(&a).unwrap();
        let cond = sigma_max / sigma_min;
        let rhs = bundled_rhs(&a, spec.rhs_seed);

        let matrix_comment = format!(
            "{} fixture: {} x {}, nnz {}, cond(A) {:.3e}, generator seed {}",
            spec.name,
            spec.rows,
            spec.cols,
            a.nnz(),
            cond,
            spec.matrix_seed
        );
        let mtx_path = out_dir.join(format!("{}.mtx", spec.name));
        write_matrix_market(&mtx_path, &a, &[&matrix_comment]).unwrap();

        let rhs_comment = format!(
            "{} bundled rhs: generating solution plus ||b||/sqrt(m)-scaled noise, seed {}",
            spec.name, spec.rhs_seed
        );
        let b_path = out_dir.join(format!("{}_b.mtx", spec.name));
        write_vector_market(&b_path, &rhs, &[&rhs_comment]).unwrap();

        println!(
            "{}: {} x {} nnz {} cond {:.3e} -> {}, {}",
            spec.name,
            spec.rows,
            spec.cols,
            a.nnz(),
            cond,
            mtx_path.display(),
            b_path.display()
        );
    }
}
