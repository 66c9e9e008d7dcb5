use crate::error::{Error, Result};

/// Dense real vector with all-finite entries.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseVector {
    values: Vec<f64>,
}

impl DenseVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                what: "DenseVector::new",
            });
        }
        Ok(DenseVector { values })
    }

    pub fn zeros(len: usize) -> Self {
        DenseVector {
            values: vec![0.0; len],
        }
    }

    /// Internal constructor for values already known to be finite.
    pub(crate) fn from_unchecked(values: Vec<f64>) -> Self {
        debug_assert!(values.iter().all(|v| v.is_finite()));
        DenseVector { values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.values
    }
}

impl std::ops::Index<usize> for DenseVector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.values[i]
    }
}

/// Inner product with sequential left-to-right accumulation.
pub fn dot(u: &DenseVector, v: &DenseVector) -> Result<f64> {
    if u.len() != v.len() {
        return Err(Error::DimensionMismatch {
            what: "dot",
            expected: u.len(),
            got: v.len(),
        });
    }
    Ok(dot_slices(u.as_slice(), v.as_slice()))
}

/// Euclidean norm, sqrt(dot(v, v)).
pub fn norm2(v: &DenseVector) -> f64 {
    norm2_slice(v.as_slice())
}

// Slice-level kernels used by the solver loops. Accumulation order is
// fixed (left to right) so runs are reproducible on one platform.

pub(crate) fn dot_slices(u: &[f64], v: &[f64]) -> f64 {
    debug_assert_eq!(u.len(), v.len());
    let mut acc = 0.0;
    for i in 0..u.len() {
        acc += u[i] * v[i];
    }
    acc
}

pub(crate) fn norm2_slice(v: &[f64]) -> f64 {
    dot_slices(v, v).sqrt()
}

pub(crate) fn norm2_sq_slice(v: &[f64]) -> f64 {
    dot_slices(v, v)
}

/// y += alpha * x
pub(crate) fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    debug_assert_eq!(x.len(), y.len());
    for i in 0..x.len() {
        y[i] += alpha * x[i];
    }
}

/// x = alpha * x
pub(crate) fn scale(alpha: f64, x: &mut [f64]) {
    for xi in x.iter_mut() {
        *xi *= alpha;
    }
}

/// p = s + beta * p
pub(crate) fn update_direction(s: &[f64], beta: f64, p: &mut [f64]) {
    debug_assert_eq!(s.len(), p.len());
    for i in 0..p.len() {
        p[i] = s[i] + beta * p[i];
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn norm2_three_four_five() {
        let v = DenseVector::new(vec![3.0, 4.0]).unwrap();
        assert_eq!(norm2(&v), 5.0);
    }

    #[test]
    fn norm2_zero_vector() {
        let v = DenseVector::zeros(4);
        assert_eq!(norm2(&v), 0.0);
    }

    #[test]
    fn dot_hand_computed() {
        let u = DenseVector::new(vec![1.0, 2.0, 3.0]).unwrap();
        let v = DenseVector::new(vec![4.0, 5.0, 6.0]).unwrap();
        assert_eq!(dot(&u, &v).unwrap(), 32.0);
    }

    #[test]
    fn dot_length_mismatch() {
        let u = DenseVector::zeros(2);
        let v = DenseVector::zeros(3);
        assert!(dot(&u, &v).is_err());
    }

    #[test]
    fn rejects_non_finite() {
        assert!(DenseVector::new(vec![1.0, f64::NAN]).is_err());
        assert!(DenseVector::new(vec![f64::INFINITY]).is_err());
    }
}
