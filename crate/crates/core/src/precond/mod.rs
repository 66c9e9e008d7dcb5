//! Split preconditioners for the normal equations.
//!
//! A nonsingular lower-triangular factor L transforms A'A into
//! L^{-1} A'A L^{-T} (least squares, L is n x n) or AA' into
//! L^{-1} AA' L^{-T} (least norm, L is m x m). Two desk-scale builders
//! are provided: the Jacobi factor diag(sqrt(diag(Gram))) computed
//! without forming the Gram matrix, and zero-fill incomplete Cholesky
//! on the explicitly formed Gram matrix. Both are exposed as an
//! operator pair (apply L^{-1}, apply L^{-T}) so factorization-free
//! variants could be slotted in without touching the solver loops.

mod solvers;

pub use solvers::{pcgls_solve, pcgne_solve, pcraig_solve, plsqr_solve};

use crate::error::{Error, Result};
use crate::sparse::SparseMatrix;

/// Which Gram matrix the preconditioner targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GramSide {
    /// A'A (n x n), for least-squares solvers.
    Cols,
    /// AA' (m x m), for least-norm solvers.
    Rows,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PrecondKind {
    Jacobi,
    Ic0,
}

/// Lower-triangular factor with strictly positive diagonal, applied via
/// forward substitution (L z = y) and back substitution (L' z = y).
#[derive(Debug, Clone)]
pub struct SplitPreconditioner {
    l: SparseMatrix,
    kind: PrecondKind,
}

impl SplitPreconditioner {
    /// Wrap a lower-triangular CSR factor, validating shape, ordering,
    /// and positive diagonal.
    pub fn from_lower_triangular(l: SparseMatrix, kind: PrecondKind) -> Result<Self> {
        if l.rows() != l.cols() {
            return Err(Error::InvalidMatrix(format!(
                "preconditioner factor must be square, got {} x {}",
                l.rows(),
                l.cols()
            )));
        }
        for i in 0..l.rows() {
            let mut saw_diag = false;
            for (j, v) in l.row(i) {
                if j > i {
                    return Err(Error::InvalidMatrix(format!(
                        "factor has an entry above the diagonal at ({i}, {j})"
                    )));
                }
                if j == i {
                    saw_diag = true;
                    if v <= 0.0 {
                        return Err(Error::InvalidMatrix(format!(
                            "factor diagonal entry {i} is not strictly positive ({v})"
                        )));
                    }
                }
            }
            if !saw_diag {
                return Err(Error::InvalidMatrix(format!(
                    "factor row {i} has no diagonal entry"
                )));
            }
        }
        Ok(SplitPreconditioner { l, kind })
    }

    pub fn identity(dim: usize) -> Self {
        SplitPreconditioner {
            l: SparseMatrix::identity(dim),
            kind: PrecondKind::Jacobi,
        }
    }

    pub fn dim(&self) -> usize {
        self.l.rows()
    }

    pub fn kind(&self) -> PrecondKind {
        self.kind
    }

    pub fn factor(&self) -> &SparseMatrix {
        &self.l
    }

    /// Solve L z = y by forward substitution.
    pub fn solve_lower(&self, y: &[f64]) -> Vec<f64> {
        assert_eq!(y.len(), self.dim());
        let n = self.dim();
        let mut z = vec![0.0; n];
        for i in 0..n {
            let mut acc = y[i];
            let mut diag = 1.0;
            for (j, v) in self.l.row(i) {
                if j < i {
                    acc -= v * z[j];
                } else {
                    diag = v;
                }
            }
            z[i] = acc / diag;
        }
        z
    }

    /// Solve L' z = y by back substitution (column sweep over L's rows).
    pub fn solve_lower_transpose(&self, y: &[f64]) -> Vec<f64> {
        assert_eq!(y.len(), self.dim());
        let n = self.dim();
        let mut z = y.to_vec();
        for i in (0..n).rev() {
            let mut diag = 1.0;
            for (j, v) in self.l.row(i) {
                if j == i {
                    diag = v;
                }
            }
            z[i] /= diag;
            let zi = z[i];
            for (j, v) in self.l.row(i) {
                if j < i {
                    z[j] -= v * zi;
                }
            }
        }
        z
    }
}

/// Diagonal of the Gram matrix without forming it: column (or row)
/// sums of squares of A.
fn gram_diagonal(a: &SparseMatrix, side: GramSide) -> Vec<f64> {
    match side {
        GramSide::Cols => {
            let mut d = vec![0.0; a.cols()];
            for i in 0..a.rows() {
                for (j, v) in a.row(i) {
                    d[j] += v * v;
                }
            }
            d
        }
        GramSide::Rows => {
            let mut d = vec![0.0; a.rows()];
            for i in 0..a.rows() {
                for (_, v) in a.row(i) {
                    d[i] += v * v;
                }
            }
            d
        }
    }
}

/// Jacobi factor: L = diag(sqrt(d)) with d the Gram diagonal.
pub fn build_jacobi(a: &SparseMatrix, side: GramSide) -> Result<SplitPreconditioner> {
    let d = gram_diagonal(a, side);
    let axis = match side {
        GramSide::Cols => "column",
        GramSide::Rows => "row",
    };
    for (i, &di) in d.iter().enumerate() {
        if di == 0.0 {
            return Err(Error::ZeroDiagonal { index: i, axis });
        }
    }
    let sqrt_d: Vec<f64> = d.iter().map(|x| x.sqrt()).collect();
    SplitPreconditioner::from_lower_triangular(SparseMatrix::diagonal(&sqrt_d)?, PrecondKind::Jacobi)
}

/// Explicit sparse Gram matrix A'A or AA'. Accumulation runs over the
/// rows of A (or A') in index order, so repeated builds are
/// bit-identical.
pub fn gram_matrix(a: &SparseMatrix, side: GramSide) -> Result<SparseMatrix> {
    let transposed;
    let base = match side {
        GramSide::Cols => a,
        GramSide::Rows => {
            transposed = a.transpose();
            &transposed
        }
    };
    let dim = base.cols();
    let mut triplets: Vec<(usize, usize, f64)> = Vec::new();
    for i in 0..base.rows() {
        let row: Vec<(usize, f64)> = base.row(i).collect();
        for &(j1, v1) in &row {
            for &(j2, v2) in &row {
                triplets.push((j1, j2, v1 * v2));
            }
        }
    }
    SparseMatrix::from_triplets(dim, dim, &triplets)
}

const IC0_DESK_CAP: usize = 5000;

/// Zero-fill incomplete Cholesky of the explicit Gram matrix. On a
/// nonpositive pivot the whole factorization is retried with a
/// diagonal shift sigma = 1e-3 * max(diag), doubling sigma up to three
/// times before giving up.
pub fn build_ic0(a: &SparseMatrix, side: GramSide) -> Result<SplitPreconditioner> {
    let dim = match side {
        GramSide::Cols => a.cols(),
        GramSide::Rows => a.rows(),
    };
    if dim > IC0_DESK_CAP {
        return Err(Error::DeskScaleExceeded {
            dim,
            cap: IC0_DESK_CAP,
        });
    }
    // A zero Gram diagonal cannot be fixed by any factorization.
    let axis = match side {
        GramSide::Cols => "column",
        GramSide::Rows => "row",
    };
    for (i, &di) in gram_diagonal(a, side).iter().enumerate() {
        if di == 0.0 {
            return Err(Error::ZeroDiagonal { index: i, axis });
        }
    }
    let gram = gram_matrix(a, side)?;
    let max_diag = (0..dim)
        .map(|i| {
            gram.row(i)
                .find(|&(j, _)| j == i)
                .map(|(_, v)| v)
                .unwrap_or(0.0)
        })
        .fold(0.0f64, f64::max);

    let sigma0 = 1e-3 * max_diag;
    let shifts = [0.0, sigma0, 2.0 * sigma0, 4.0 * sigma0, 8.0 * sigma0];
    for &shift in &shifts {
        match ic0_factor(&gram, shift) {
            Ok(l) => return SplitPreconditioner::from_lower_triangular(l, PrecondKind::Ic0),
            Err(_) => continue,
        }
    }
    Err(Error::FactorizationFailed(format!(
        "nonpositive pivot persisted after {} diagonal-shift retries; use the jacobi preconditioner",
        shifts.len() - 1
    )))
}

/// One IC(0) attempt on the lower sparsity pattern of `gram + shift*I`.
fn ic0_factor(gram: &SparseMatrix, shift: f64) -> std::result::Result<SparseMatrix, usize> {
    let n = gram.rows();
    // Row patterns of L: the lower triangle of the Gram pattern.
    let mut rows: Vec<Vec<(usize, f64)>> = Vec::with_capacity(n);
    for i in 0..n {
        let mut row: Vec<(usize, f64)> = gram.row(i).filter(|&(j, _)| j <= i).collect();
        if let Some(last) = row.last_mut() {
            if last.0 == i {
                last.1 += shift;
            }
        }
        // L_ij = (G_ij - sum_p L_ip L_jp) / L_jj over the shared
        // pattern p < j, then the pivot from what remains.
        for idx in 0..row.len() {
            let (j, g_ij) = row[idx];
            if j == i {
                let mut s = g_ij;
                for &(_, v) in &row[..idx] {
                    s -= v * v;
                }
                if s <= 0.0 {
                    return Err(i);
                }
                row[idx].1 = s.sqrt();
            } else {
                let mut s = g_ij;
                // Merge the sorted prefixes of row i and row j.
                let row_j = &rows[j];
                let mut a_it = row[..idx].iter().peekable();
                let mut b_it = row_j.iter().take_while(|&&(p, _)| p < j).peekable();
                while let (Some(&&(pa, va)), Some(&&(pb, vb))) = (a_it.peek(), b_it.peek()) {
                    match pa.cmp(&pb) {
                        std::cmp::Ordering::Less => {
                            a_it.next();
                        }
                        std::cmp::Ordering::Greater => {
                            b_it.next();
                        }
                        std::cmp::Ordering::Equal => {
                            s -= va * vb;
                            a_it.next();
                            b_it.next();
                        }
                    }
                }
                let l_jj = row_j.last().expect("diagonal present").1;
                row[idx].1 = s / l_jj;
            }
        }
        // The Gram matrix of a full-column-rank slice always has its
        // diagonal in the pattern; guard anyway.
        if row.last().map(|&(j, _)| j) != Some(i) {
            return Err(i);
        }
        rows.push(row);
    }

    let mut triplets = Vec::new();
    for (i, row) in rows.iter().enumerate() {
        for &(j, v) in row {
            triplets.push((i, j, v));
        }
    }
    SparseMatrix::from_triplets(n, n, &triplets).map_err(|_| n)
}
