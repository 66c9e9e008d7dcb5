use crate::error::{Error, Result};
use crate::rng::SplitMix64;
use crate::sparse::{mat_vec, SparseMatrix};
use crate::vector::DenseVector;

/// Which problem the right-hand side is built for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProblemKind {
    /// min ||b - Az||; b generally not in the range of A.
    LeastSquares,
    /// min ||z|| subject to Az = b; b constructed inside the range of A.
    LeastNorm,
}

/// A matrix together with a reproducibly generated (or loaded) RHS.
#[derive(Debug, Clone)]
pub struct ProblemInstance {
    pub matrix: SparseMatrix,
    pub rhs: DenseVector,
    pub kind: ProblemKind,
    pub seed: u64,
}

/// The generating solution: ones, then every 2nd entry (1-based) set to
/// -2, then every 5th entry set to 0, in that statement order, so an
/// index divisible by both ends at 0.
pub fn generating_solution(n: usize) -> DenseVector {
    let mut x = vec![1.0; n];
    let mut i = 1;
    while i < n {
        x[i] = -2.0;
        i += 2;
    }
    let mut i = 4;
    while i < n {
        x[i] = 0.0;
        i += 5;
    }
    DenseVector::from_unchecked(x)
}

/// Build the RHS for `A` from the generating solution: b_LN = A x_gen
/// for least-norm problems, and b_LS = b_LN + g * ||b_LN|| with g a
/// standard-normal vector drawn from `seed` for least-squares problems.
pub fn generate_rhs(a: &SparseMatrix, kind: ProblemKind, seed: u64) -> Result<ProblemInstance> {
    if a.rows() == 0 || a.cols() == 0 {
        return Err(Error::InvalidMatrix("empty matrix".into()));
    }
    let x_gen = generating_solution(a.cols());
    let b_ln = mat_vec(a, &x_gen)?;
    let rhs = match kind {
        ProblemKind::LeastNorm => b_ln,
        ProblemKind::LeastSquares => {
            let norm = crate::vector::norm2(&b_ln);
            let mut rng = SplitMix64::new(seed);
            let mut b = b_ln.into_vec();
            for bi in b.iter_mut() {
                *bi += rng.next_normal() * norm;
            }
            DenseVector::new(b)?
        }
    };
    Ok(ProblemInstance {
        matrix: a.clone(),
        rhs,
        kind,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generating_solution_n5() {
        assert_eq!(
            generating_solution(5).as_slice(),
            &[1.0, -2.0, 1.0, -2.0, 0.0]
        );
    }

    #[test]
    fn generating_solution_n10() {
        // Executing the recipe by hand: -2 at 1-based even positions,
        // then 0 at positions divisible by 5.
        assert_eq!(
            generating_solution(10).as_slice(),
            &[1.0, -2.0, 1.0, -2.0, 0.0, -2.0, 1.0, -2.0, 1.0, 0.0]
        );
    }

    #[test]
    fn least_norm_rhs_is_a_times_x_gen() {
        let a = SparseMatrix::from_dense(2, 3, &[1.0, 0.0, 2.0, 0.0, 3.0, 1.0]).unwrap();
        let inst = generate_rhs(&a, ProblemKind::LeastNorm, 0).unwrap();
        let expected = mat_vec(&a, &generating_solution(3)).unwrap();
        assert_eq!(inst.rhs, expected);
    }

    #[test]
    fn equal_seeds_are_bit_identical() {
        let a = SparseMatrix::from_dense(3, 2, &[1.0, 2.0, 0.0, 1.0, 4.0, 0.0]).unwrap();
        let p = generate_rhs(&a, ProblemKind::LeastSquares, 42).unwrap();
        let q = generate_rhs(&a, ProblemKind::LeastSquares, 42).unwrap();
        for (x, y) in p.rhs.as_slice().iter().zip(q.rhs.as_slice()) {
            assert_eq!(x.to_bits(), y.to_bits());
        }
        let r = generate_rhs(&a, ProblemKind::LeastSquares, 43).unwrap();
        assert_ne!(p.rhs, r.rhs);
    }
}
