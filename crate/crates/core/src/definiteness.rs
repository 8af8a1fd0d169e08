//! Tolerance-aware inertia, rank and definiteness tests.

use std::fmt;

use crate::error::{Error, Result};
use crate::jacobi::{symmetric_eigen, EigenDecomposition};
use crate::symmetric::{Matrix, SymMatrix};
use crate::tolerance::ToleranceConfig;

/// Counts of positive, negative and zero eigenvalues.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct InertiaTriple {
    pub positive: usize,
    pub negative: usize,
    pub zero: usize,
}

impl InertiaTriple {
    pub fn order(&self) -> usize {
        self.positive + self.negative + self.zero
    }

    pub fn rank(&self) -> usize {
        self.positive + self.negative
    }
}

impl fmt::Display for InertiaTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.positive, self.negative, self.zero)
    }
}

/// Eigenvalue-zero threshold for a computed decomposition.
pub fn eigen_threshold(e: &EigenDecomposition, tol: &ToleranceConfig) -> f64 {
    tol.zero_threshold(e.spectral_radius(), e.values.len())
}

pub fn inertia_of(e: &EigenDecomposition, tol: &ToleranceConfig) -> InertiaTriple {
    let tau = eigen_threshold(e, tol);
    let mut out = InertiaTriple {
        positive: 0,
        negative: 0,
        zero: 0,
    };
    for &value in &e.values {
        if value > tau {
            out.positive += 1;
        } else if value < -tau {
            out.negative += 1;
        } else {
            out.zero += 1;
        }
    }
    out
}

pub fn inertia(a: &SymMatrix, tol: &ToleranceConfig) -> Result<InertiaTriple> {
    Ok(inertia_of(&symmetric_eigen(a, tol)?, tol))
}

pub fn rank(a: &SymMatrix, tol: &ToleranceConfig) -> Result<usize> {
    Ok(inertia(a, tol)?.rank())
}

pub fn is_psd(a: &SymMatrix, tol: &ToleranceConfig) -> Result<bool> {
    Ok(inertia(a, tol)?.negative == 0)
}

/// Positive definiteness, decided by eigenvalue signs and confirmed by an
/// attempted Cholesky factorization with pivots above the same threshold.
pub fn is_pd(a: &SymMatrix, tol: &ToleranceConfig) -> Result<bool> {
    let e = symmetric_eigen(a, tol)?;
    let tau = eigen_threshold(&e, tol);
    let eigen_verdict = inertia_of(&e, tol).positive == a.n();
    let pivot_verdict = cholesky_lower(a, tau).is_ok();
    if eigen_verdict != pivot_verdict {
        return Err(Error::InconsistentDefiniteness {
            eigen_verdict,
            pivot_verdict,
            min_eigenvalue: e.min_value(),
        });
    }
    Ok(eigen_verdict)
}

/// Lower-triangular `L` with `A = L Lᵗ`, failing on the first pivot `<= threshold`.
pub(crate) fn cholesky_lower(a: &SymMatrix, threshold: f64) -> Result<Matrix> {
    let n = a.n();
    let mut l = Matrix::zeros(n, n);
    for j in 0..n {
        let mut pivot = a.get(j, j);
        for k in 0..j {
            pivot -= l[(j, k)] * l[(j, k)];
        }
        if !(pivot > threshold) {
            return Err(Error::NotPd { index: j, pivot });
        }
        let d = pivot.sqrt();
        l[(j, j)] = d;
        for i in (j + 1)..n {
            let mut s = a.get(i, j);
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = s / d;
        }
    }
    Ok(l)
}

/// Checks `diag(A) = (W ∘ (W⁻¹)ᵗ) λ` for the eigen-decomposition `A = W D W⁻¹`.
///
/// `W⁻¹` is formed by a general LU inverse rather than by transposition, so
/// the check does not lean on the orthogonality of `W`.
pub fn diag_spectrum_identity_check(a: &SymMatrix, tol: &ToleranceConfig) -> Result<bool> {
    let e = symmetric_eigen(a, tol)?;
    let n = a.n();
    let w = &e.vectors;
    let w_inv = w
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::Internal("eigenvector matrix is not invertible".into()))?;
    let w_inv_t = w_inv.transpose();
    let mut diff = 0.0;
    for i in 0..n {
        let rhs: f64 = (0..n)
            .map(|k| w[(i, k)] * w_inv_t[(i, k)] * e.values[k])
            .sum();
        let d = a.get(i, i) - rhs;
        diff += d * d;
    }
    Ok(diff.sqrt() <= tol.tol_residual * a.frobenius_norm().max(f64::MIN_POSITIVE))
}
