//! Cyclic Jacobi eigensolver for symmetric matrices.

use crate::error::{Error, Result};
use crate::symmetric::{Matrix, SymMatrix};
use crate::tolerance::ToleranceConfig;

/// Eigenvalues sorted descending, with unit eigenvectors stored as the
/// matching columns of `vectors`, so that `A = V diag(values) Vᵗ`.
///
/// Each eigenvector is sign-normalized: its largest-magnitude entry (first
/// one on ties) is positive.
#[derive(Clone, Debug)]
pub struct EigenDecomposition {
    pub values: Vec<f64>,
    pub vectors: Matrix,
    pub sweeps: usize,
}

impl EigenDecomposition {
    pub fn spectral_radius(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    pub fn vector(&self, k: usize) -> Vec<f64> {
        self.vectors.column(k).iter().copied().collect()
    }

    pub fn min_value(&self) -> f64 {
        *self
            .values
            .last()
            .expect("decomposition of an empty matrix")
    }
}

fn off_diagonal_norm(a: &Matrix) -> f64 {
    let n = a.nrows();
    let mut sum = 0.0;
    for p in 0..n {
        for q in (p + 1)..n {
            sum += a[(p, q)] * a[(p, q)];
        }
    }
    (2.0 * sum).sqrt()
}

/// Diagonalizes `a` with cyclic row-by-row Jacobi rotations.
///
/// Sweeps stop once the off-diagonal Frobenius norm falls below
/// `tol.tol_eig * ‖A‖_F`, followed by one polishing sweep; needing more
/// than `tol.max_jacobi_sweeps` sweeps is an error.
pub fn symmetric_eigen(a: &SymMatrix, tol: &ToleranceConfig) -> Result<EigenDecomposition> {
    let n = a.n();
    let mut m = a.to_dense();
    let mut v = Matrix::identity(n, n);
    let target = tol.tol_eig * a.frobenius_norm();

    let mut sweeps = 0;
    loop {
        let off = off_diagonal_norm(&m);
        if off <= target || off == 0.0 {
            break;
        }
        if sweeps == tol.max_jacobi_sweeps {
            return Err(Error::NoConvergence { sweeps, off });
        }
        sweep(&mut m, &mut v);
        sweeps += 1;
    }
    // Convergence is quadratic near the end, so one more sweep takes the
    // off-diagonal mass from the stopping level down to rounding.
    if off_diagonal_norm(&m) > 0.0 {
        sweep(&mut m, &mut v);
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(j, j)].total_cmp(&m[(i, i)]));
    let values: Vec<f64> = order.iter().map(|&k| m[(k, k)]).collect();
    let mut vectors = Matrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let col = v.column(src);
        let mut pivot = 0;
        for r in 1..n {
            if col[r].abs() > col[pivot].abs() {
                pivot = r;
            }
        }
        let sign = if col[pivot] < 0.0 { -1.0 } else { 1.0 };
        for r in 0..n {
            vectors[(r, dst)] = sign * col[r];
        }
    }
    Ok(EigenDecomposition {
        values,
        vectors,
        sweeps,
    })
}

/// One cyclic row-by-row pass of rotations annihilating each `m[p][q]`.
fn sweep(m: &mut Matrix, v: &mut Matrix) {
    let n = m.nrows();
    for p in 0..n {
        for q in (p + 1)..n {
            let apq = m[(p, q)];
            if apq == 0.0 {
                continue;
            }
            let theta = (m[(q, q)] - m[(p, p)]) / (2.0 * apq);
            let t = if theta.abs() > 1e150 {
                0.5 / theta
            } else {
                theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
            };
            let c = 1.0 / (t * t + 1.0).sqrt();
            let s = t * c;
            rotate(m, v, p, q, c, s);
            m[(p, q)] = 0.0;
            m[(q, p)] = 0.0;
        }
    }
}

/// Applies `m ← Jᵗ m J` and `v ← v J` for the plane rotation in `(p, q)`.
fn rotate(m: &mut Matrix, v: &mut Matrix, p: usize, q: usize, c: f64, s: f64) {
    let n = m.nrows();
    for k in 0..n {
        let (mkp, mkq) = (m[(k, p)], m[(k, q)]);
        m[(k, p)] = c * mkp - s * mkq;
        m[(k, q)] = s * mkp + c * mkq;
    }
    for k in 0..n {
        let (mpk, mqk) = (m[(p, k)], m[(q, k)]);
        m[(p, k)] = c * mpk - s * mqk;
        m[(q, k)] = s * mpk + c * mqk;
    }
    for k in 0..n {
        let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
        v[(k, p)] = c * vkp - s * vkq;
        v[(k, q)] = s * vkp + c * vkq;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn residual(a: &SymMatrix, e: &EigenDecomposition) -> f64 {
        let d = Matrix::from_diagonal(&nalgebra::DVector::from_vec(e.values.clone()));
        let rebuilt = &e.vectors * d * e.vectors.transpose();
        (rebuilt - a.to_dense()).norm() / a.frobenius_norm().max(f64::MIN_POSITIVE)
    }

    #[test]
    fn two_by_two_swap() {
        let a = SymMatrix::from_packed(2, vec![0.0, 1.0, 0.0]).unwrap();
        let e = symmetric_eigen(&a, &ToleranceConfig::default()).unwrap();
        assert!((e.values[0] - 1.0).abs() < 1e-15);
        assert!((e.values[1] + 1.0).abs() < 1e-15);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((e.vectors[(0, 0)] - h).abs() < 1e-15);
        assert!((e.vectors[(1, 0)] - h).abs() < 1e-15);
        assert!(residual(&a, &e) < 1e-15);
    }

    #[test]
    fn diagonal_input_needs_no_sweeps() {
        let a = SymMatrix::from_diagonal(&[2.0, -3.0, 5.0]);
        let e = symmetric_eigen(&a, &ToleranceConfig::default()).unwrap();
        assert_eq!(e.values, vec![5.0, 2.0, -3.0]);
        assert_eq!(e.sweeps, 0);
        assert_eq!(e.vectors[(2, 0)], 1.0);
        assert_eq!(e.vectors[(0, 1)], 1.0);
        assert_eq!(e.vectors[(1, 2)], 1.0);
    }

    #[test]
    fn zero_matrix() {
        let e = symmetric_eigen(&SymMatrix::zeros(3), &ToleranceConfig::default()).unwrap();
        assert_eq!(e.values, vec![0.0; 3]);
        assert_eq!(e.spectral_radius(), 0.0);
    }

    #[test]
    fn sweep_cap_is_enforced() {
        let a = SymMatrix::from_fn(6, |i, j| 1.0 / (1.0 + i as f64 + j as f64));
        let tol = ToleranceConfig {
            max_jacobi_sweeps: 1,
            tol_eig: 1e-15,
            ..Default::default()
        };
        assert!(matches!(
            symmetric_eigen(&a, &tol),
            Err(Error::NoConvergence { sweeps: 1, .. })
        ));
    }

    #[test]
    fn hilbert_like_matrix_reconstructs() {
        let a = SymMatrix::from_fn(7, |i, j| {
            1.0 / (1.0 + i as f64 + j as f64) + (i == j) as u8 as f64
        });
        let e = symmetric_eigen(&a, &ToleranceConfig::default()).unwrap();
        assert!(residual(&a, &e) < 1e-12);
        let vtv = e.vectors.transpose() * &e.vectors;
        assert!((vtv - Matrix::identity(7, 7)).norm() < 1e-12);
        assert!(e.values.windows(2).all(|w| w[0] >= w[1]));
    }
}
