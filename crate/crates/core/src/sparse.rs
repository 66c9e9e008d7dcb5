use crate::error::{Error, Result};
use crate::vector::DenseVector;

/// Immutable CSR sparse matrix.
///
/// Both products y = Av and z = A'u are computed from the one stored
/// copy; the transpose product runs a scatter pass over the rows so no
/// second matrix is ever materialized. Within each row the column
/// indices are strictly increasing and accumulation is left to right,
/// which keeps repeated runs bit-identical on one platform.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl SparseMatrix {
    /// Build from coordinate triplets. Duplicate (i, j) entries are
    /// summed; entries within a row end up sorted by column.
    pub fn from_triplets(
        rows: usize,
        cols: usize,
        triplets: &[(usize, usize, f64)],
    ) -> Result<Self> {
        let mut entries: Vec<(usize, usize, f64)> = Vec::with_capacity(triplets.len());
        for &(i, j, v) in triplets {
            if i >= rows {
                return Err(Error::InvalidMatrix(format!(
                    "row index {i} out of range for {rows} rows"
                )));
            }
            if j >= cols {
                return Err(Error::InvalidMatrix(format!(
                    "column index {j} out of range for {cols} columns"
                )));
            }
            if !v.is_finite() {
                return Err(Error::NonFinite {
                    what: "SparseMatrix::from_triplets",
                });
            }
            entries.push((i, j, v));
        }
        // Stable sort keeps duplicate summation in input order.
        entries.sort_by_key(|&(i, j, _)| (i, j));

        let mut row_ptr = vec![0usize; rows + 1];
        let mut col_idx = Vec::with_capacity(entries.len());
        let mut values = Vec::with_capacity(entries.len());
        let mut prev: Option<(usize, usize)> = None;
        for &(i, j, v) in &entries {
            if prev == Some((i, j)) {
                *values.last_mut().unwrap() += v;
            } else {
                col_idx.push(j);
                values.push(v);
                row_ptr[i + 1] += 1;
                prev = Some((i, j));
            }
        }
        for i in 0..rows {
            row_ptr[i + 1] += row_ptr[i];
        }
        Self::from_csr(rows, cols, row_ptr, col_idx, values)
    }

    /// Build from raw CSR arrays, validating every structural invariant.
    pub fn from_csr(
        rows: usize,
        cols: usize,
        row_ptr: Vec<usize>,
        col_idx: Vec<usize>,
        values: Vec<f64>,
    ) -> Result<Self> {
        if row_ptr.len() != rows + 1 {
            return Err(Error::InvalidMatrix(format!(
                "row_ptr has length {}, expected {}",
                row_ptr.len(),
                rows + 1
            )));
        }
        if row_ptr[0] != 0 || row_ptr[rows] != col_idx.len() || col_idx.len() != values.len() {
            return Err(Error::InvalidMatrix(
                "row_ptr endpoints do not match nnz".into(),
            ));
        }
        for i in 0..rows {
            if row_ptr[i] > row_ptr[i + 1] {
                return Err(Error::InvalidMatrix(format!(
                    "row_ptr decreases at row {i}"
                )));
            }
            let row = &col_idx[row_ptr[i]..row_ptr[i + 1]];
            for w in row.windows(2) {
                if w[0] >= w[1] {
                    return Err(Error::InvalidMatrix(format!(
                        "columns not strictly increasing in row {i}"
                    )));
                }
            }
            if let Some(&last) = row.last() {
                if last >= cols {
                    return Err(Error::InvalidMatrix(format!(
                        "column index {last} out of range in row {i}"
                    )));
                }
            }
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                what: "SparseMatrix::from_csr",
            });
        }
        Ok(SparseMatrix {
            rows,
            cols,
            row_ptr,
            col_idx,
            values,
        })
    }

    pub fn identity(n: usize) -> Self {
        SparseMatrix {
            rows: n,
            cols: n,
            row_ptr: (0..=n).collect(),
            col_idx: (0..n).collect(),
            values: vec![1.0; n],
        }
    }

    pub fn diagonal(diag: &[f64]) -> Result<Self> {
        let n = diag.len();
        let triplets: Vec<(usize, usize, f64)> =
            diag.iter().enumerate().map(|(i, &d)| (i, i, d)).collect();
        Self::from_triplets(n, n, &triplets)
    }

    /// Dense row-major matrix, mostly for desk-scale oracles.
    pub fn from_dense(rows: usize, cols: usize, data: &[f64]) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                what: "SparseMatrix::from_dense",
                expected: rows * cols,
                got: data.len(),
            });
        }
        let mut triplets = Vec::new();
        for i in 0..rows {
            for j in 0..cols {
                let v = data[i * cols + j];
                if v != 0.0 {
                    triplets.push((i, j, v));
                }
            }
        }
        Self::from_triplets(rows, cols, &triplets)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row_ptr(&self) -> &[usize] {
        &self.row_ptr
    }

    pub fn col_idx(&self) -> &[usize] {
        &self.col_idx
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Entries of row i as (column, value) pairs.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let lo = self.row_ptr[i];
        let hi = self.row_ptr[i + 1];
        self.col_idx[lo..hi]
            .iter()
            .copied()
            .zip(self.values[lo..hi].iter().copied())
    }

    pub fn frobenius_norm(&self) -> f64 {
        let mut acc = 0.0;
        for v in &self.values {
            acc += v * v;
        }
        acc.sqrt()
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.rows * self.cols];
        for i in 0..self.rows {
            for (j, v) in self.row(i) {
                out[i * self.cols + j] = v;
            }
        }
        out
    }

    pub fn transpose(&self) -> SparseMatrix {
        let mut counts = vec![0usize; self.cols + 1];
        for &j in &self.col_idx {
            counts[j + 1] += 1;
        }
        for j in 0..self.cols {
            counts[j + 1] += counts[j];
        }
        let row_ptr = counts.clone();
        let mut next = counts;
        let mut col_idx = vec![0usize; self.nnz()];
        let mut values = vec![0.0; self.nnz()];
        for i in 0..self.rows {
            for (j, v) in self.row(i) {
                let dst = next[j];
                col_idx[dst] = i;
                values[dst] = v;
                next[j] += 1;
            }
        }
        SparseMatrix {
            rows: self.cols,
            cols: self.rows,
            row_ptr,
            col_idx,
            values,
        }
    }

    pub(crate) fn mat_vec_into(&self, v: &[f64], out: &mut [f64]) {
        debug_assert_eq!(v.len(), self.cols);
        debug_assert_eq!(out.len(), self.rows);
        for i in 0..self.rows {
            let mut acc = 0.0;
            for idx in self.row_ptr[i]..self.row_ptr[i + 1] {
                acc += self.values[idx] * v[self.col_idx[idx]];
            }
            out[i] = acc;
        }
    }

    pub(crate) fn mat_vec_transpose_into(&self, u: &[f64], out: &mut [f64]) {
        debug_assert_eq!(u.len(), self.rows);
        debug_assert_eq!(out.len(), self.cols);
        out.fill(0.0);
        for i in 0..self.rows {
            let ui = u[i];
            for idx in self.row_ptr[i]..self.row_ptr[i + 1] {
                out[self.col_idx[idx]] += self.values[idx] * ui;
            }
        }
    }
}

/// y = Av with exact CSR accumulation order (left to right within a row).
pub fn mat_vec(a: &SparseMatrix, v: &DenseVector) -> Result<DenseVector> {
    if v.len() != a.cols {
        return Err(Error::DimensionMismatch {
            what: "mat_vec",
            expected: a.cols,
            got: v.len(),
        });
    }
    let mut out = vec![0.0; a.rows];
    a.mat_vec_into(v.as_slice(), &mut out);
    if out.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite { what: "mat_vec" });
    }
    Ok(DenseVector::from_unchecked(out))
}

/// z = A'u computed by a scatter pass over the rows of A.
pub fn mat_vec_transpose(a: &SparseMatrix, u: &DenseVector) -> Result<DenseVector> {
    if u.len() != a.rows {
        return Err(Error::DimensionMismatch {
            what: "mat_vec_transpose",
            expected: a.rows,
            got: u.len(),
        });
    }
    let mut out = vec![0.0; a.cols];
    a.mat_vec_transpose_into(u.as_slice(), &mut out);
    if out.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite {
            what: "mat_vec_transpose",
        });
    }
    Ok(DenseVector::from_unchecked(out))
}
