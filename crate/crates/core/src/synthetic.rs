//! Synthetic test instances.
//!
//! Grammar accepted by the CLI and the test suites:
//!
//! * `identity:N` — the N x N identity.
//! * `diag:d1,d2,...` — diagonal matrix with the given entries.
//! * `svd:m,n,cond,seed` — dense m x n matrix with geometrically spaced
//!   singular values from 1 down to 1/cond and seeded random orthogonal
//!   factors. This is how ill-conditioned analogs of published test
//!   cases are built.

use crate::error::{Error, Result};
use crate::rng::SplitMix64;
use crate::sparse::SparseMatrix;

#[derive(Debug, Clone, PartialEq)]
pub enum SyntheticSpec {
    Identity { n: usize },
    Diag { entries: Vec<f64> },
    Svd { m: usize, n: usize, cond: f64, seed: u64 },
}

impl SyntheticSpec {
    /// Parse the `kind:args` grammar.
    pub fn parse(spec: &str) -> Result<Self> {
        let bad = |msg: String| Error::InvalidParam(msg);
        let (kind, args) = spec
            .split_once(':')
            .ok_or_else(|| bad(format!("synthetic spec `{spec}` missing `:`")))?;
        match kind {
            "identity" => {
                let n: usize = args
                    .parse()
                    .map_err(|_| bad(format!("identity size `{args}` not an integer")))?;
                if n == 0 {
                    return Err(bad("identity size must be positive".into()));
                }
                Ok(SyntheticSpec::Identity { n })
            }
            "diag" => {
                let entries: Vec<f64> = args
                    .split(',')
                    .map(|t| {
                        t.trim()
                            .parse::<f64>()
                            .map_err(|_| bad(format!("diag entry `{t}` not a number")))
                    })
                    .collect::<Result<_>>()?;
                if entries.is_empty() {
                    return Err(bad("diag needs at least one entry".into()));
                }
                Ok(SyntheticSpec::Diag { entries })
            }
            "svd" => {
                let parts: Vec<&str> = args.split(',').collect();
                if parts.len() != 4 {
                    return Err(bad(format!(
                        "svd spec needs m,n,cond,seed, got `{args}`"
                    )));
                }
                let m: usize = parts[0]
                    .parse()
                    .map_err(|_| bad(format!("svd m `{}` not an integer", parts[0])))?;
                let n: usize = parts[1]
                    .parse()
                    .map_err(|_| bad(format!("svd n `{}` not an integer", parts[1])))?;
                let cond: f64 = parts[2]
                    .parse()
                    .map_err(|_| bad(format!("svd cond `{}` not a number", parts[2])))?;
                let seed: u64 = parts[3]
                    .parse()
                    .map_err(|_| bad(format!("svd seed `{}` not an integer", parts[3])))?;
                if m == 0 || n == 0 {
                    return Err(bad("svd dimensions must be positive".into()));
                }
                if !(cond >= 1.0 && cond.is_finite()) {
                    return Err(bad("svd cond must be finite and >= 1".into()));
                }
                Ok(SyntheticSpec::Svd { m, n, cond, seed })
            }
            other => Err(bad(format!("unknown synthetic kind `{other}`"))),
        }
    }

    pub fn build(&self) -> Result<SparseMatrix> {
        match self {
            SyntheticSpec::Identity { n } => Ok(SparseMatrix::identity(*n)),
            SyntheticSpec::Diag { entries } => SparseMatrix::diagonal(entries),
            SyntheticSpec::Svd { m, n, cond, seed } => Ok(svd_matrix(*m, *n, *cond, *seed)),
        }
    }
}

/// Dense matrix U diag(sigma) V' with geometric singular values
/// sigma_i = cond^(-i/(r-1)) and random orthonormal U (m x r), V (n x r).
pub fn svd_matrix(m: usize, n: usize, cond: f64, seed: u64) -> SparseMatrix {
    let r = m.min(n);
    let mut rng = SplitMix64::new(seed);
    let u = random_orthonormal(m, r, &mut rng);
    let v = random_orthonormal(n, r, &mut rng);
    let sigma: Vec<f64> = (0..r)
        .map(|i| {
            if r == 1 {
                1.0
            } else {
                cond.powf(-(i as f64) / (r as f64 - 1.0))
            }
        })
        .collect();
    let mut dense = vec![0.0; m * n];
    for i in 0..m {
        for j in 0..n {
            let mut acc = 0.0;
            for k in 0..r {
                acc += u[i * r + k] * sigma[k] * v[j * r + k];
            }
            dense[i * n + j] = acc;
        }
    }
    SparseMatrix::from_dense(m, n, &dense).expect("finite dense entries")
}

/// Random m x r matrix with orthonormal columns (column-major logic,
/// row-major storage m x r): Gaussian fill, then modified Gram-Schmidt
/// with one reorthogonalization pass.
pub fn random_orthonormal(m: usize, r: usize, rng: &mut SplitMix64) -> Vec<f64> {
    assert!(r <= m);
    let mut cols: Vec<Vec<f64>> = (0..r)
        .map(|_| {
            let mut c = vec![0.0; m];
            rng.fill_normal(&mut c);
            c
        })
        .collect();
    for j in 0..r {
        for _pass in 0..2 {
            for i in 0..j {
                let proj = crate::vector::dot_slices(&cols[j], &cols[i]);
                for t in 0..m {
                    cols[j][t] -= proj * cols[i][t];
                }
            }
        }
        let norm = crate::vector::norm2_slice(&cols[j]);
        // A zero norm would need m Gaussian entries to cancel exactly.
        let inv = 1.0 / norm;
        for t in 0..m {
            cols[j][t] *= inv;
        }
    }
    let mut out = vec![0.0; m * r];
    for (j, c) in cols.iter().enumerate() {
        for i in 0..m {
            out[i * r + j] = c[i];
        }
    }
    out
}

/// Sparse rectangular matrix with `per_row` nonzeros per row at seeded
/// random columns (every column is hit at least once) and geometric
/// column scaling from 1 down to 1/cond_scale.
pub fn sparse_scaled_random(
    rows: usize,
    cols: usize,
    per_row: usize,
    cond_scale: f64,
    seed: u64,
) -> SparseMatrix {
    let scale: Vec<f64> = (0..cols)
        .map(|j| {
            if cols == 1 {
                1.0
            } else {
                cond_scale.powf(-(j as f64) / (cols as f64 - 1.0))
            }
        })
        .collect();
    sparse_profiled_random(rows, cols, per_row, &scale, seed)
}

/// Sparse matrix with an explicit per-column scale profile; the
/// general form behind the geometric and clustered generators.
pub fn sparse_profiled_random(
    rows: usize,
    cols: usize,
    per_row: usize,
    scale: &[f64],
    seed: u64,
) -> SparseMatrix {
    assert!(rows >= cols, "tall matrices only");
    assert_eq!(scale.len(), cols);
    let mut rng = SplitMix64::new(seed);
    let mut triplets: Vec<(usize, usize, f64)> = Vec::with_capacity(rows * per_row);
    for i in 0..rows {
        // Guarantee full column coverage via a wrapped diagonal band.
        let mut cols_in_row = vec![i % cols];
        while cols_in_row.len() < per_row {
            let j = rng.next_index(cols);
            if !cols_in_row.contains(&j) {
                cols_in_row.push(j);
            }
        }
        for j in cols_in_row {
            triplets.push((i, j, rng.next_normal() * scale[j]));
        }
    }
    SparseMatrix::from_triplets(rows, cols, &triplets).expect("valid random triplets")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vector::dot_slices;

    #[test]
    fn parses_identity() {
        assert_eq!(
            SyntheticSpec::parse("identity:5").unwrap(),
            SyntheticSpec::Identity { n: 5 }
        );
    }

    #[test]
    fn parses_diag() {
        assert_eq!(
            SyntheticSpec::parse("diag:1,2,3").unwrap(),
            SyntheticSpec::Diag {
                entries: vec![1.0, 2.0, 3.0]
            }
        );
    }

    #[test]
    fn parses_svd() {
        assert_eq!(
            SyntheticSpec::parse("svd:200,100,1e6,7").unwrap(),
            SyntheticSpec::Svd {
                m: 200,
                n: 100,
                cond: 1e6,
                seed: 7
            }
        );
    }

    #[test]
    fn rejects_garbage() {
        assert!(SyntheticSpec::parse("identity").is_err());
        assert!(SyntheticSpec::parse("svd:1,2,3").is_err());
        assert!(SyntheticSpec::parse("banded:4").is_err());
        assert!(SyntheticSpec::parse("svd:10,5,0.5,1").is_err());
    }

    #[test]
    fn orthonormal_columns() {
        let mut rng = SplitMix64::new(3);
        let m = 12;
        let r = 5;
        let q = random_orthonormal(m, r, &mut rng);
        for a in 0..r {
            for b in 0..r {
                let col_a: Vec<f64> = (0..m).map(|i| q[i * r + a]).collect();
                let col_b: Vec<f64> = (0..m).map(|i| q[i * r + b]).collect();
                let d = dot_slices(&col_a, &col_b);
                let want = if a == b { 1.0 } else { 0.0 };
                assert!((d - want).abs() < 1e-12, "({a},{b}): {d}");
            }
        }
    }

    #[test]
    fn svd_matrix_extreme_singular_values() {
        let a = svd_matrix(10, 6, 100.0, 5);
        assert_eq!((a.rows(), a.cols()), (10, 6));
        // Frobenius norm equals the norm of the singular values.
        let want: f64 = (0..6)
            .map(|i| 100.0f64.powf(-(i as f64) / 5.0).powi(2))
            .sum::<f64>()
            .sqrt();
        assert!((a.frobenius_norm() - want).abs() < 1e-10);
    }

    #[test]
    fn sparse_random_covers_all_columns() {
        let a = sparse_scaled_random(40, 11, 4, 100.0, 9);
        let mut seen = vec![false; 11];
        for i in 0..40 {
            for (j, _) in a.row(i) {
                seen[j] = true;
            }
        }
        assert!(seen.iter().all(|&s| s));
    }
}
