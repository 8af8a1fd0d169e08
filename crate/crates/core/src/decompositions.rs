//! Constructive decompositions of symmetric and PSD matrices.
//!
//! Beyond the textbook spectral and square-root factorizations this module
//! carries the two constructions the factorization pipeline depends on:
//! [`peel_dense_rank1`], which splits a PSD matrix with nonzero diagonal into
//! an entrywise-nonzero rank-one term plus a PSD remainder, and
//! [`rank_deficient_witness`], which builds a singular PSD matrix whose
//! Hadamard product with `xxᵗ + yyᵗ` is positive definite.

use std::f64::consts::FRAC_PI_4;

use crate::definiteness::{eigen_threshold, inertia_of, is_pd, is_psd, rank};
use crate::error::{Error, Result};
use crate::jacobi::symmetric_eigen;
use crate::symmetric::{Matrix, SymMatrix};
use crate::tolerance::ToleranceConfig;

/// Orthogonal `q` (eigenvectors as rows) and eigenvalues sorted descending,
/// with `q A qᵗ = diag(lambda)`.
#[derive(Clone, Debug)]
pub struct Spectral {
    pub q: Matrix,
    pub lambda: Vec<f64>,
}

pub fn spectral(a: &SymMatrix, tol: &ToleranceConfig) -> Result<Spectral> {
    let e = symmetric_eigen(a, tol)?;
    Ok(Spectral {
        q: e.vectors.transpose(),
        lambda: e.values,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn of(value: f64) -> Self {
        if value < 0.0 {
            Sign::Minus
        } else {
            Sign::Plus
        }
    }

    pub fn as_f64(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SignedTerm {
    pub sign: Sign,
    pub vector: Vec<f64>,
}

/// `A = Σ kᵢ xᵢ xᵢᵗ` over pairwise orthogonal `xᵢ`, one term per nonzero eigenvalue.
#[derive(Clone, Debug)]
pub struct SignedRank1Decomposition {
    pub n: usize,
    pub terms: Vec<SignedTerm>,
}

impl SignedRank1Decomposition {
    pub fn reconstruct(&self) -> SymMatrix {
        let mut acc = SymMatrix::zeros(self.n);
        for t in &self.terms {
            acc = acc
                .add_scaled(t.sign.as_f64(), &SymMatrix::outer(&t.vector))
                .expect("terms share the order of the decomposition");
        }
        acc
    }
}

/// Terms `xᵢ = √|λᵢ| vᵢ`, `kᵢ = sign(λᵢ)` over eigenvalues above the zero threshold,
/// in descending eigenvalue order.
pub fn signed_rank1_decomp(
    a: &SymMatrix,
    tol: &ToleranceConfig,
) -> Result<SignedRank1Decomposition> {
    let e = symmetric_eigen(a, tol)?;
    let tau = eigen_threshold(&e, tol);
    let terms = e
        .values
        .iter()
        .enumerate()
        .filter(|(_, v)| v.abs() > tau)
        .map(|(k, &v)| {
            let s = v.abs().sqrt();
            SignedTerm {
                sign: Sign::of(v),
                vector: e.vector(k).into_iter().map(|c| s * c).collect(),
            }
        })
        .collect();
    Ok(SignedRank1Decomposition { n: a.n(), terms })
}

/// Invertible `W` and rank `r` with `A = W (Σ_{i<r} Eᵢᵢ) Wᵗ`.
///
/// The first `r` columns of `W` are the `√λ`-scaled eigenvectors of the
/// positive eigenvalues, the rest an orthonormal basis of the kernel. When
/// `A` is positive definite, `r = n` and `A = W Wᵗ`.
pub fn psd_congruence_factor(a: &SymMatrix, tol: &ToleranceConfig) -> Result<(Matrix, usize)> {
    let e = symmetric_eigen(a, tol)?;
    let inertia = inertia_of(&e, tol);
    if inertia.negative > 0 {
        return Err(Error::NotPsd {
            min_eigenvalue: e.min_value(),
        });
    }
    let r = inertia.positive;
    let n = a.n();
    let mut w = e.vectors.clone();
    for k in 0..r {
        let s = e.values[k].sqrt();
        for i in 0..n {
            w[(i, k)] *= s;
        }
    }
    Ok((w, r))
}

/// Lower-triangular `L` with positive diagonal and `A = L Lᵗ`.
pub fn pd_square_root_factor(a: &SymMatrix, tol: &ToleranceConfig) -> Result<Matrix> {
    let scale = a.diagonal().iter().fold(0.0f64, |m, v| m.max(v.abs()));
    crate::definiteness::cholesky_lower(a, tol.zero_threshold(scale, a.n()))
}

/// Output of [`peel_dense_rank1`]: `A = x xᵗ + remainder`.
#[derive(Clone, Debug)]
pub struct PeelResult {
    /// Every entry has magnitude above `tol_zero`.
    pub x: Vec<f64>,
    /// PSD, rank one less than the input.
    pub remainder: SymMatrix,
}

/// Mixing angles scanned by [`peel_dense_rank1`]: `π/4` and
/// `π/4 + jπ/(4(n+2))` for `j = 1..=n+1`, all strictly inside `(0, π/2)`.
pub fn mixing_angles(n: usize) -> Vec<f64> {
    let step = FRAC_PI_4 / (n + 2) as f64;
    (0..=n + 1).map(|j| FRAC_PI_4 + j as f64 * step).collect()
}

/// Splits a PSD matrix with nonzero diagonal into `x xᵗ + B` with `x`
/// entrywise nonzero and `B` PSD of rank one less.
///
/// Starting from the rank-one terms `x₁, …, x_r` of the spectral
/// decomposition, the running vector `u` is merged with each next term as
/// `u ← αu + βx`, `v = βu − αx` with `α = cos θ`, `β = sin θ`, which keeps
/// `u uᵗ + x xᵗ = u' u'ᵗ + v vᵗ`. For every merge the angle is the candidate
/// from [`mixing_angles`] maximizing the smallest entry of `u'` over the
/// union of supports of `u` and `x`. At most `n` angles zero some entry, so
/// a candidate always survives.
pub fn peel_dense_rank1(a: &SymMatrix, tol: &ToleranceConfig) -> Result<PeelResult> {
    let n = a.n();
    if let Some((i, d)) = a
        .diagonal()
        .into_iter()
        .enumerate()
        .find(|(_, d)| !(*d > tol.tol_zero))
    {
        return Err(Error::Precondition(format!(
            "diagonal entry {i} is {d:e}, not above tol_zero"
        )));
    }
    let decomp = signed_rank1_decomp(a, tol)?;
    if decomp.terms.iter().any(|t| t.sign == Sign::Minus) {
        return Err(Error::Precondition("input is not PSD".into()));
    }
    let mut terms = decomp.terms.into_iter().map(|t| t.vector);
    let mut u = terms
        .next()
        .ok_or_else(|| Error::Precondition("input has rank 0".into()))?;
    let angles = mixing_angles(n);
    let mut remainder = SymMatrix::zeros(n);

    for x in terms {
        let support: Vec<usize> = (0..n)
            .filter(|&m| u[m].abs() > tol.tol_zero || x[m].abs() > tol.tol_zero)
            .collect();
        let mut best: Option<(f64, f64)> = None;
        for &theta in &angles {
            let (beta, alpha) = theta.sin_cos();
            let worst = support
                .iter()
                .map(|&m| (alpha * u[m] + beta * x[m]).abs())
                .fold(f64::INFINITY, f64::min);
            if best.is_none_or(|(_, b)| worst > b) {
                best = Some((theta, worst));
            }
        }
        let (theta, worst) = best.expect("candidate list is never empty");
        if !(worst > tol.tol_zero) {
            return Err(Error::Internal(format!(
                "no mixing angle keeps the merged support above tol_zero (best {worst:e})"
            )));
        }
        let (beta, alpha) = theta.sin_cos();
        let v: Vec<f64> = (0..n).map(|m| beta * u[m] - alpha * x[m]).collect();
        u = (0..n).map(|m| alpha * u[m] + beta * x[m]).collect();
        remainder = &remainder + &SymMatrix::outer(&v);
    }

    if let Some((i, v)) = u
        .iter()
        .enumerate()
        .find(|(_, v)| !(v.abs() > tol.tol_zero))
    {
        return Err(Error::Internal(format!(
            "peeled vector entry {i} is {v:e}; tolerances are inconsistent"
        )));
    }
    Ok(PeelResult { x: u, remainder })
}

/// `rank(A + x xᵗ)`.
pub fn rank_after_rank1_update(a: &SymMatrix, x: &[f64], tol: &ToleranceConfig) -> Result<usize> {
    if x.len() != a.n() {
        return Err(Error::DimensionMismatch {
            expected: a.n(),
            found: x.len(),
        });
    }
    rank(&(a + &SymMatrix::outer(x)), tol)
}

/// Singular PSD matrix `A` of rank `n−1` with `A ∘ (x xᵗ + y yᵗ)` positive definite.
///
/// Picks the pair `(p, q)` with the largest gap between ratios `y_p/x_p` and
/// `y_q/x_q`, then returns `(e_p + e_q)(e_p + e_q)ᵗ + Σ_{i∉{p,q}} Eᵢᵢ`. The
/// kernel of `A` is spanned by `e_p − e_q`, and the `y yᵗ` term is what makes
/// the product definite along it.
pub fn rank_deficient_witness(x: &[f64], y: &[f64], tol: &ToleranceConfig) -> Result<SymMatrix> {
    let n = x.len();
    if y.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: y.len(),
        });
    }
    if n < 2 {
        return Err(Error::Precondition("order must be at least 2".into()));
    }
    if let Some((i, v)) = x
        .iter()
        .enumerate()
        .find(|(_, v)| !(v.abs() > tol.tol_zero))
    {
        return Err(Error::Precondition(format!(
            "x has a near-zero entry {v:e} at index {i}"
        )));
    }
    let ratios: Vec<f64> = x.iter().zip(y).map(|(a, b)| b / a).collect();
    let (mut p, mut q) = (0, 0);
    for i in 1..n {
        if ratios[i] > ratios[p] {
            p = i;
        }
        if ratios[i] < ratios[q] {
            q = i;
        }
    }
    let gap = ratios[p] - ratios[q];
    let scale = ratios.iter().fold(1.0f64, |m, r| m.max(r.abs()));
    if !(gap > tol.tol_zero * scale) {
        return Err(Error::Precondition(format!(
            "x and y are numerically dependent (ratio gap {gap:e})"
        )));
    }
    let (p, q) = (p.min(q), p.max(q));
    let a = SymMatrix::from_fn(n, |i, j| {
        let in_pair = |k: usize| k == p || k == q;
        if i == j || (in_pair(i) && in_pair(j)) {
            1.0
        } else {
            0.0
        }
    });

    if rank(&a, tol)? != n - 1 || !is_psd(&a, tol)? || is_pd(&a, tol)? {
        return Err(Error::Internal(
            "witness is not singular PSD of rank n-1".into(),
        ));
    }
    let target = &SymMatrix::outer(x) + &SymMatrix::outer(y);
    if !is_pd(&a.hadamard(&target)?, tol)? {
        return Err(Error::Precondition(
            "Hadamard product with xxᵗ+yyᵗ is not numerically positive definite".into(),
        ));
    }
    Ok(a)
}
