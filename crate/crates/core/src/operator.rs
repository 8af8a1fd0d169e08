//! Linear maps on symmetric matrices as `d × d` matrices, `d = n(n+1)/2`.
//!
//! Coordinates follow [`BasisIndexing`]: the diagonal units `E_ii` come
//! first, then `E_ij + E_ji` for `i < j` in lexicographic order. The
//! off-diagonal basis elements are not normalized, so the coefficient of
//! `E_ij + E_ji` in `A` is simply `a_ij`.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::symmetric::{packed_len, Matrix, SymMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BasisIndexing {
    n: usize,
}

impl BasisIndexing {
    pub fn new(n: usize) -> Self {
        Self { n }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        packed_len(self.n)
    }

    /// Coordinate position of the pair `{i, j}` (zero-based, either order).
    pub fn position(&self, i: usize, j: usize) -> usize {
        let n = self.n;
        assert!(i < n && j < n, "index out of range");
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        if i == j {
            return i;
        }
        // off-diagonal pairs of rows 0..i come first: (n-1) + (n-2) + ... + (n-i)
        n + i * (2 * n - i - 1) / 2 + (j - i - 1)
    }

    /// Index pair `(i, j)`, `i <= j`, of a coordinate position.
    pub fn pair(&self, pos: usize) -> (usize, usize) {
        let n = self.n;
        assert!(pos < self.dim(), "position out of range");
        if pos < n {
            return (pos, pos);
        }
        let mut rest = pos - n;
        for i in 0..n {
            let row = n - i - 1;
            if rest < row {
                return (i, i + 1 + rest);
            }
            rest -= row;
        }
        unreachable!("position checked against dim")
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.dim()).map(|p| self.pair(p))
    }
}

/// `E_ii` when `i == j`, else `E_ij + E_ji`; indices are zero-based.
pub fn basis_element(n: usize, i: usize, j: usize) -> Result<SymMatrix> {
    if n == 0 {
        return Err(Error::EmptyMatrix);
    }
    if i >= n || j >= n || i > j {
        return Err(Error::IndexOutOfRange { n, i, j });
    }
    Ok(unit(n, i, j))
}

fn unit(n: usize, i: usize, j: usize) -> SymMatrix {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    SymMatrix::from_fn(n, |r, c| if r == i && c == j { 1.0 } else { 0.0 })
}

pub fn to_coords(a: &SymMatrix) -> Vec<f64> {
    let basis = BasisIndexing::new(a.n());
    basis.pairs().map(|(i, j)| a.get(i, j)).collect()
}

pub fn from_coords(n: usize, coords: &[f64]) -> Result<SymMatrix> {
    if n == 0 {
        return Err(Error::EmptyMatrix);
    }
    let basis = BasisIndexing::new(n);
    if coords.len() != basis.dim() {
        return Err(Error::DimensionMismatch {
            expected: basis.dim(),
            found: coords.len(),
        });
    }
    let m = SymMatrix::from_fn(n, |i, j| coords[basis.position(i, j)]);
    SymMatrix::from_packed(n, m.packed().to_vec())
}

/// A linear map `T: Sₙ(ℝ) → Sₙ(ℝ)` in [`BasisIndexing`] coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorMatrix {
    n: usize,
    mat: Matrix,
}

impl OperatorMatrix {
    pub fn new(n: usize, mat: Matrix) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyMatrix);
        }
        let d = packed_len(n);
        if mat.nrows() != d || mat.ncols() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: if mat.nrows() != d {
                    mat.nrows()
                } else {
                    mat.ncols()
                },
            });
        }
        for r in 0..d {
            for c in 0..d {
                if !mat[(r, c)].is_finite() {
                    return Err(Error::NonFinite { row: r, col: c });
                }
            }
        }
        Ok(Self { n, mat })
    }

    /// Builds the operator column by column from its action on basis elements.
    pub fn from_map(n: usize, mut f: impl FnMut(&SymMatrix) -> SymMatrix) -> Self {
        let basis = BasisIndexing::new(n);
        let d = basis.dim();
        let mut mat = Matrix::zeros(d, d);
        for (col, (i, j)) in basis.pairs().enumerate() {
            let image = f(&unit(n, i, j));
            assert_eq!(image.n(), n, "map changed the matrix order");
            for (row, v) in to_coords(&image).into_iter().enumerate() {
                mat[(row, col)] = v;
            }
        }
        Self { n, mat }
    }

    pub fn identity(n: usize) -> Self {
        let d = packed_len(n);
        Self {
            n,
            mat: Matrix::identity(d, d),
        }
    }

    /// `A ↦ −A`.
    pub fn negation(n: usize) -> Self {
        let d = packed_len(n);
        Self {
            n,
            mat: -Matrix::identity(d, d),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.mat
    }

    pub fn apply(&self, a: &SymMatrix) -> Result<SymMatrix> {
        if a.n() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: a.n(),
            });
        }
        let c = &self.mat * DVector::from_vec(to_coords(a));
        from_coords(self.n, c.as_slice())
    }

    /// `A ↦ self(other(A))`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if other.n != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: other.n,
            });
        }
        Ok(Self {
            n: self.n,
            mat: &self.mat * &other.mat,
        })
    }

    /// `‖self − other‖_F / max(‖other‖_F, tiny)` on the coordinate matrices.
    pub fn relative_distance(&self, other: &Self) -> f64 {
        if self.n != other.n {
            return f64::INFINITY;
        }
        (&self.mat - &other.mat).norm() / other.mat.norm().max(f64::MIN_POSITIVE)
    }
}

/// `|det W| / Πᵢ ‖row i‖`, a scale-free invertibility measure in `[0, 1]`.
pub fn normalized_determinant(w: &Matrix) -> f64 {
    let rows: f64 = w.row_iter().map(|r| r.norm()).product();
    if rows == 0.0 {
        return 0.0;
    }
    (w.clone().lu().determinant().abs() / rows).min(1.0)
}

/// Threshold on [`normalized_determinant`] below which a factor counts as singular.
pub const SINGULARITY_THRESHOLD: f64 = 1e-12;

fn check_invertible(w: &Matrix, n: usize, index: usize) -> Result<()> {
    if w.nrows() != w.ncols() {
        return Err(Error::DimensionMismatch {
            expected: w.nrows(),
            found: w.ncols(),
        });
    }
    if w.nrows() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: w.nrows(),
        });
    }
    let measure = normalized_determinant(w);
    if !(measure > SINGULARITY_THRESHOLD) {
        return Err(Error::Singular { index, measure });
    }
    Ok(())
}

/// `A ↦ Σᵢ Wᵢ A Wᵢᵗ`.
pub fn op_from_congruences(ws: &[Matrix]) -> Result<OperatorMatrix> {
    let first = ws
        .first()
        .ok_or_else(|| Error::Precondition("at least one congruence factor required".into()))?;
    let n = first.nrows();
    if n == 0 {
        return Err(Error::EmptyMatrix);
    }
    for (k, w) in ws.iter().enumerate() {
        check_invertible(w, n, k)?;
    }
    Ok(OperatorMatrix::from_map(n, |b| {
        let mut acc = SymMatrix::zeros(n);
        for w in ws {
            acc = &acc + &b.congruence(w).expect("orders checked above");
        }
        acc
    }))
}

/// `A ↦ W (H ∘ A) Wᵗ`.
pub fn op_from_hadamard_congruence(w: &Matrix, h: &SymMatrix) -> Result<OperatorMatrix> {
    check_invertible(w, h.n(), 0)?;
    Ok(hadamard_congruence_unchecked(w, h))
}

pub(crate) fn hadamard_congruence_unchecked(w: &Matrix, h: &SymMatrix) -> OperatorMatrix {
    OperatorMatrix::from_map(h.n(), |b| {
        h.hadamard(b)
            .and_then(|hb| hb.congruence(w))
            .expect("orders agree by construction")
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::definiteness::rank;
    use crate::random::random_invertible;
    use crate::tolerance::ToleranceConfig;

    #[test]
    fn basis_positions_round_trip() {
        for n in 1..9 {
            let b = BasisIndexing::new(n);
            for pos in 0..b.dim() {
                let (i, j) = b.pair(pos);
                assert!(i <= j);
                assert_eq!(b.position(i, j), pos);
                assert_eq!(b.position(j, i), pos);
            }
        }
        let b = BasisIndexing::new(3);
        let order: Vec<_> = b.pairs().collect();
        assert_eq!(order, vec![(0, 0), (1, 1), (2, 2), (0, 1), (0, 2), (1, 2)]);
    }

    #[test]
    fn basis_element_examples() {
        assert_eq!(
            basis_element(2, 0, 0).unwrap(),
            SymMatrix::from_diagonal(&[1.0, 0.0])
        );
        assert_eq!(
            basis_element(2, 0, 1).unwrap(),
            SymMatrix::from_packed(2, vec![0.0, 1.0, 0.0]).unwrap()
        );
        let mut sum = SymMatrix::zeros(4);
        for i in 0..4 {
            sum = &sum + &basis_element(4, i, i).unwrap();
        }
        assert_eq!(sum, SymMatrix::identity(4));
        assert!(basis_element(2, 1, 0).is_err());
        assert!(basis_element(2, 0, 2).is_err());
    }

    #[test]
    fn coords_examples() {
        assert_eq!(to_coords(&SymMatrix::identity(2)), vec![1.0, 1.0, 0.0]);
        let a = SymMatrix::from_packed(2, vec![1.0, 2.0, 3.0]).unwrap();
        assert_eq!(to_coords(&a), vec![1.0, 3.0, 2.0]);
        assert_eq!(from_coords(2, &[1.0, 3.0, 2.0]).unwrap(), a);
        assert!(from_coords(2, &[1.0]).is_err());
    }

    #[test]
    fn identity_and_negation() {
        let a = SymMatrix::from_fn(3, |i, j| (i + 2 * j) as f64);
        assert_eq!(OperatorMatrix::identity(3).apply(&a).unwrap(), a);
        assert_eq!(OperatorMatrix::negation(3).apply(&a).unwrap(), -&a);
        assert!(OperatorMatrix::identity(2).apply(&a).is_err());
    }

    #[test]
    fn congruence_operator_matches_direct_congruence() {
        let w = random_invertible(4, 3, 1e4).unwrap();
        let t = op_from_congruences(std::slice::from_ref(&w)).unwrap();
        let a = crate::random::random_symmetric(4, 9);
        let direct = a.congruence(&w).unwrap();
        assert!(t.apply(&a).unwrap().relative_distance(&direct) < 1e-13);
        assert_eq!(
            op_from_congruences(&[Matrix::identity(3, 3)]).unwrap(),
            OperatorMatrix::identity(3)
        );
    }

    #[test]
    fn congruence_operator_rejects_bad_factors() {
        let singular = Matrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 4.0]);
        assert!(matches!(
            op_from_congruences(&[Matrix::identity(2, 2), singular]),
            Err(Error::Singular { index: 1, .. })
        ));
        assert!(op_from_congruences(&[Matrix::zeros(2, 3)]).is_err());
        assert!(op_from_congruences(&[]).is_err());
    }

    #[test]
    fn sum_of_congruences_spreads_rank() {
        let w1 = random_invertible(4, 1, 1e4).unwrap();
        let w2 = random_invertible(4, 2, 1e4).unwrap();
        let t = op_from_congruences(&[w1.clone(), w2.clone()]).unwrap();
        let e11 = basis_element(4, 0, 0).unwrap();
        let image = t.apply(&e11).unwrap();
        let direct = &e11.congruence(&w1).unwrap() + &e11.congruence(&w2).unwrap();
        assert!(image.relative_distance(&direct) < 1e-13);
        assert_eq!(rank(&image, &ToleranceConfig::default()).unwrap(), 2);
    }

    #[test]
    fn hadamard_congruence_examples() {
        let t = op_from_hadamard_congruence(&Matrix::identity(3, 3), &SymMatrix::ones(3)).unwrap();
        assert_eq!(t, OperatorMatrix::identity(3));

        let u = [1.0, -1.0];
        let t =
            op_from_hadamard_congruence(&Matrix::identity(2, 2), &SymMatrix::outer(&u)).unwrap();
        let d = Matrix::from_diagonal(&DVector::from_vec(u.to_vec()));
        let a = SymMatrix::from_packed(2, vec![2.0, 5.0, -3.0]).unwrap();
        assert_eq!(t.apply(&a).unwrap(), a.congruence(&d).unwrap());
    }

    #[test]
    fn compose_examples() {
        let w = random_invertible(3, 5, 1e4).unwrap();
        let w_inv = w.clone().try_inverse().unwrap();
        let t = op_from_congruences(&[w]).unwrap();
        let t_inv = op_from_congruences(&[w_inv]).unwrap();
        let id = OperatorMatrix::identity(3);
        assert!(t.compose(&t_inv).unwrap().relative_distance(&id) < 1e-12);
        assert_eq!(id.compose(&t).unwrap(), t);
        assert!(id.compose(&OperatorMatrix::identity(2)).is_err());
    }

    #[test]
    fn operator_new_validates_shape() {
        assert!(OperatorMatrix::new(2, Matrix::identity(3, 3)).is_ok());
        assert!(OperatorMatrix::new(2, Matrix::identity(4, 4)).is_err());
        let mut m = Matrix::identity(3, 3);
        m[(1, 2)] = f64::INFINITY;
        assert!(OperatorMatrix::new(2, m).is_err());
    }
}
