//! Real symmetric matrices in packed upper-triangular storage.
//!
//! Each unordered index pair `{i, j}` owns exactly one slot, so every value of
//! [`SymMatrix`] is symmetric by construction. Entries are laid out row-major
//! over the upper triangle: `(0,0), (0,1), ..., (0,n-1), (1,1), ...`.

use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Dense square matrix used for congruence factors and other non-symmetric data.
pub type Matrix = DMatrix<f64>;

#[derive(Clone, Debug, PartialEq)]
pub struct SymMatrix {
    n: usize,
    packed: Vec<f64>,
}

/// Length of the packed upper triangle of an order-`n` matrix.
pub const fn packed_len(n: usize) -> usize {
    n * (n + 1) / 2
}

#[inline]
fn packed_index(n: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    // row i starts after rows 0..i, which hold n, n-1, ..., n-i+1 entries
    i * n - i * i.saturating_sub(1) / 2 + (j - i)
}

impl SymMatrix {
    /// Builds a matrix from its packed upper triangle.
    pub fn from_packed(n: usize, packed: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyMatrix);
        }
        let expected = packed_len(n);
        if packed.len() != expected {
            return Err(Error::PackedLength {
                n,
                expected,
                found: packed.len(),
            });
        }
        let m = Self { n, packed };
        m.check_finite()?;
        Ok(m)
    }

    pub fn zeros(n: usize) -> Self {
        assert!(n > 0, "matrix order must be positive");
        Self {
            n,
            packed: vec![0.0; packed_len(n)],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_diagonal(&vec![1.0; n])
    }

    /// The all-ones matrix, neutral element of the Hadamard product.
    pub fn ones(n: usize) -> Self {
        assert!(n > 0, "matrix order must be positive");
        Self {
            n,
            packed: vec![1.0; packed_len(n)],
        }
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        Self::from_fn(n, |i, j| if i == j { diag[i] } else { 0.0 })
    }

    /// Fills the matrix by evaluating `f(i, j)` on the upper triangle `i <= j`.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        assert!(n > 0, "matrix order must be positive");
        let mut packed = Vec::with_capacity(packed_len(n));
        for i in 0..n {
            for j in i..n {
                packed.push(f(i, j));
            }
        }
        Self { n, packed }
    }

    /// Accepts a full square matrix whose mirrored entries agree within
    /// `rel_tol` (relative to the larger magnitude); stores their mean.
    pub fn from_dense(m: &Matrix, rel_tol: f64) -> Result<Self> {
        if m.nrows() == 0 {
            return Err(Error::EmptyMatrix);
        }
        if m.nrows() != m.ncols() {
            return Err(Error::DimensionMismatch {
                expected: m.nrows(),
                found: m.ncols(),
            });
        }
        let n = m.nrows();
        for i in 0..n {
            for j in 0..n {
                if !m[(i, j)].is_finite() {
                    return Err(Error::NonFinite { row: i, col: j });
                }
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                let (upper, lower) = (m[(i, j)], m[(j, i)]);
                if (upper - lower).abs() > rel_tol * upper.abs().max(lower.abs()) {
                    return Err(Error::NotSymmetric {
                        row: i,
                        col: j,
                        upper,
                        lower,
                    });
                }
            }
        }
        Ok(Self::from_fn(n, |i, j| 0.5 * (m[(i, j)] + m[(j, i)])))
    }

    /// Symmetric part `(M + Mᵗ)/2` of an arbitrary square matrix.
    pub fn symmetric_part(m: &Matrix) -> Self {
        assert_eq!(m.nrows(), m.ncols(), "symmetric_part needs a square matrix");
        Self::from_fn(m.nrows(), |i, j| 0.5 * (m[(i, j)] + m[(j, i)]))
    }

    /// Rank-one matrix `x xᵗ`.
    pub fn outer(x: &[f64]) -> Self {
        Self::from_fn(x.len(), |i, j| x[i] * x[j])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn packed(&self) -> &[f64] {
        &self.packed
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        assert!(i < self.n && j < self.n, "index out of range");
        self.packed[packed_index(self.n, i, j)]
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    pub fn to_dense(&self) -> Matrix {
        Matrix::from_fn(self.n, self.n, |i, j| self.get(i, j))
    }

    pub fn frobenius_norm(&self) -> f64 {
        let mut sum = 0.0;
        for i in 0..self.n {
            for j in i..self.n {
                let v = self.get(i, j);
                sum += if i == j { v * v } else { 2.0 * v * v };
            }
        }
        sum.sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.packed.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    pub fn mul_vec(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_len(x.len())?;
        Ok((0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j) * x[j]).sum())
            .collect())
    }

    /// Entrywise (Hadamard) product.
    pub fn hadamard(&self, other: &Self) -> Result<Self> {
        self.check_len(other.n)?;
        let packed = self
            .packed
            .iter()
            .zip(&other.packed)
            .map(|(a, b)| a * b)
            .collect();
        Ok(Self { n: self.n, packed })
    }

    /// Quadratic form `⟨Ax, x⟩ = Σᵢⱼ aᵢⱼ xᵢ xⱼ`.
    pub fn quad_form(&self, x: &[f64]) -> Result<f64> {
        self.check_len(x.len())?;
        let mut sum = 0.0;
        for i in 0..self.n {
            sum += self.get(i, i) * x[i] * x[i];
            for j in (i + 1)..self.n {
                sum += 2.0 * self.get(i, j) * x[i] * x[j];
            }
        }
        Ok(sum)
    }

    /// Congruence `W A Wᵗ`; only the upper triangle of the product is formed.
    pub fn congruence(&self, w: &Matrix) -> Result<Self> {
        if w.nrows() != w.ncols() {
            return Err(Error::DimensionMismatch {
                expected: w.nrows(),
                found: w.ncols(),
            });
        }
        self.check_len(w.nrows())?;
        let wa = w * self.to_dense();
        Ok(Self::from_fn(self.n, |i, j| {
            wa.row(i)
                .iter()
                .zip(w.row(j).iter())
                .map(|(a, b)| a * b)
                .sum()
        }))
    }

    pub fn scale(&self, alpha: f64) -> Self {
        Self {
            n: self.n,
            packed: self.packed.iter().map(|v| alpha * v).collect(),
        }
    }

    /// `self + alpha * other`.
    pub fn add_scaled(&self, alpha: f64, other: &Self) -> Result<Self> {
        self.check_len(other.n)?;
        Ok(Self {
            n: self.n,
            packed: self
                .packed
                .iter()
                .zip(&other.packed)
                .map(|(a, b)| a + alpha * b)
                .collect(),
        })
    }

    /// Relative Frobenius distance `‖self − other‖ / max(‖other‖, tiny)`.
    pub fn relative_distance(&self, other: &Self) -> f64 {
        let diff = self.add_scaled(-1.0, other).map(|d| d.frobenius_norm());
        match diff {
            Ok(d) => d / other.frobenius_norm().max(f64::MIN_POSITIVE),
            Err(_) => f64::INFINITY,
        }
    }

    fn check_len(&self, found: usize) -> Result<()> {
        if found != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found,
            });
        }
        Ok(())
    }

    fn check_finite(&self) -> Result<()> {
        for i in 0..self.n {
            for j in i..self.n {
                if !self.get(i, j).is_finite() {
                    return Err(Error::NonFinite { row: i, col: j });
                }
            }
        }
        Ok(())
    }
}

impl Add for &SymMatrix {
    type Output = SymMatrix;

    fn add(self, rhs: &SymMatrix) -> SymMatrix {
        self.add_scaled(1.0, rhs)
            .expect("order mismatch in SymMatrix addition")
    }
}

impl Sub for &SymMatrix {
    type Output = SymMatrix;

    fn sub(self, rhs: &SymMatrix) -> SymMatrix {
        self.add_scaled(-1.0, rhs)
            .expect("order mismatch in SymMatrix subtraction")
    }
}

impl Mul<&SymMatrix> for f64 {
    type Output = SymMatrix;

    fn mul(self, rhs: &SymMatrix) -> SymMatrix {
        rhs.scale(self)
    }
}

impl Neg for &SymMatrix {
    type Output = SymMatrix;

    fn neg(self) -> SymMatrix {
        self.scale(-1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m2(a: f64, b: f64, c: f64) -> SymMatrix {
        SymMatrix::from_packed(2, vec![a, b, c]).unwrap()
    }

    #[test]
    fn packed_layout_is_row_major_upper() {
        let a = SymMatrix::from_fn(3, |i, j| (10 * i + j) as f64);
        assert_eq!(a.packed(), &[0.0, 1.0, 2.0, 11.0, 12.0, 22.0]);
        assert_eq!(a.get(2, 1), 12.0);
        assert_eq!(a.get(1, 2), 12.0);
        let b = SymMatrix::from_fn(5, |i, j| (10 * i + j) as f64);
        for i in 0..5 {
            for j in i..5 {
                assert_eq!(b.get(i, j), (10 * i + j) as f64);
                assert_eq!(b.get(j, i), (10 * i + j) as f64);
            }
        }
    }

    #[test]
    fn rejects_bad_packed_input() {
        assert!(matches!(
            SymMatrix::from_packed(2, vec![1.0, 2.0]),
            Err(Error::PackedLength { expected: 3, .. })
        ));
        assert!(matches!(
            SymMatrix::from_packed(2, vec![1.0, f64::NAN, 2.0]),
            Err(Error::NonFinite { row: 0, col: 1 })
        ));
        assert!(matches!(
            SymMatrix::from_packed(0, vec![]),
            Err(Error::EmptyMatrix)
        ));
    }

    #[test]
    fn from_dense_checks_symmetry() {
        let ok = Matrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 3.0]);
        assert_eq!(
            SymMatrix::from_dense(&ok, 1e-12).unwrap(),
            m2(1.0, 2.0, 3.0)
        );
        let bad = Matrix::from_row_slice(2, 2, &[1.0, 2.0, 2.1, 3.0]);
        assert!(matches!(
            SymMatrix::from_dense(&bad, 1e-12),
            Err(Error::NotSymmetric { row: 0, col: 1, .. })
        ));
    }

    #[test]
    fn hadamard_small_example() {
        let a = m2(1.0, 2.0, 3.0);
        let b = m2(5.0, 0.0, 7.0);
        assert_eq!(a.hadamard(&b).unwrap(), m2(5.0, 0.0, 21.0));
        assert_eq!(a.hadamard(&SymMatrix::ones(2)).unwrap(), a);
        assert!(a.hadamard(&SymMatrix::ones(3)).is_err());
    }

    #[test]
    fn quad_form_examples() {
        let x = [1.0, 2.0, 3.0];
        assert_eq!(SymMatrix::identity(3).quad_form(&x).unwrap(), 14.0);
        let e11 = m2(1.0, 0.0, 0.0);
        assert_eq!(e11.quad_form(&[0.0, 4.5]).unwrap(), 0.0);
        assert!(e11.quad_form(&x).is_err());
    }

    #[test]
    fn congruence_examples() {
        let a = m2(1.0, 2.0, 3.0);
        let id = Matrix::identity(2, 2);
        assert_eq!(a.congruence(&id).unwrap(), a);
        let d = Matrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, 2.0]));
        assert_eq!(
            SymMatrix::identity(2).congruence(&d).unwrap(),
            SymMatrix::from_diagonal(&[1.0, 4.0])
        );
        assert!(a.congruence(&Matrix::identity(3, 3)).is_err());
        assert!(a.congruence(&Matrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn outer_examples() {
        assert_eq!(SymMatrix::outer(&[1.0, 0.0]), m2(1.0, 0.0, 0.0));
        assert_eq!(SymMatrix::outer(&[0.0, 0.0]), SymMatrix::zeros(2));
    }

    #[test]
    fn order_one_is_a_scalar() {
        let a = SymMatrix::from_packed(1, vec![3.0]).unwrap();
        let b = SymMatrix::from_packed(1, vec![-2.0]).unwrap();
        assert_eq!(a.hadamard(&b).unwrap().get(0, 0), -6.0);
        assert_eq!(a.quad_form(&[2.0]).unwrap(), 12.0);
        let w = Matrix::from_element(1, 1, 5.0);
        assert_eq!(a.congruence(&w).unwrap().get(0, 0), 75.0);
    }

    #[test]
    fn frobenius_counts_off_diagonal_twice() {
        let a = m2(1.0, 2.0, 3.0);
        assert!((a.frobenius_norm() - (1.0f64 + 8.0 + 9.0).sqrt()).abs() < 1e-15);
    }
}
