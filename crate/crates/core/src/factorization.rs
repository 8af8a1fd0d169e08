//! Recovery of `T(A) = W (H ∘ A) Wᵗ` from a positive-definite preserver.
//!
//! [`factorize_hadamard`] runs the constructive argument as an algorithm:
//! normalize `T(I)` to the identity with its Cholesky factor `W₁`, read the
//! orthonormal frame `uᵢ` off the rank-one images of `Eᵢᵢ`, rotate it to the
//! standard basis with `W₂ = [u₁ … uₙ]`, and read `hᵢⱼ` off the image of
//! `Eᵢⱼ + Eⱼᵢ`, which must be a multiple of itself. Every step is verified;
//! a map outside the Hadamard-congruence family surfaces as an error naming
//! the first violated property.
//!
//! Intermediate quantities carry rounding error of order `ε·κ(T(I))`, so the
//! structural checks (orthonormality, support, PSD of `H`) compare against
//! `max(tol_residual, noise_floor)`, where the noise floor is
//! [`NOISE_FACTOR`]` · n · ε · κ(T(I))`. The final reconstruction residual is
//! always held to `tol_residual` itself.

use nalgebra::DVector;

use crate::decompositions::{
    pd_square_root_factor, peel_dense_rank1, rank_deficient_witness, signed_rank1_decomp, Sign,
};
use crate::definiteness::{eigen_threshold, inertia_of, is_pd, rank};
use crate::error::{Error, Result};
use crate::jacobi::symmetric_eigen;
use crate::operator::{
    basis_element, hadamard_congruence_unchecked, BasisIndexing, OperatorMatrix,
};
use crate::symmetric::{Matrix, SymMatrix};
use crate::tolerance::ToleranceConfig;

/// Multiplier on `n · ε · κ(T(I))` giving the noise floor of recovered quantities.
pub const NOISE_FACTOR: f64 = 64.0;

/// Single-congruence form `T(A) = W_std A W_stdᵗ` with `W_std = W · diag(u)`.
#[derive(Clone, Debug)]
pub struct StandardForm {
    pub w_std: Matrix,
    /// Entries of `u`, normalized so that `u₁ = +1`.
    pub signs: Vec<Sign>,
    pub residual: f64,
}

impl StandardForm {
    pub fn sign_values(&self) -> Vec<f64> {
        self.signs.iter().map(|s| s.as_f64()).collect()
    }
}

/// Intermediate factors of the pipeline, `W = W₁ · W₂`.
#[derive(Clone, Debug)]
pub struct Provenance {
    /// Lower-triangular Cholesky factor of `T(I)`.
    pub w1: Matrix,
    /// Orthogonal matrix whose columns are the frame vectors `uᵢ`.
    pub w2: Matrix,
    /// Estimated condition number of `T(I)`.
    pub condition: f64,
    pub noise_floor: f64,
}

#[derive(Clone, Debug)]
pub struct FactorizationResult {
    pub w: Matrix,
    /// PSD with unit diagonal.
    pub h: SymMatrix,
    /// Largest relative reconstruction error over the basis elements.
    pub residual: f64,
    /// Present exactly when `rank(H) = 1`.
    pub standard: Option<StandardForm>,
    pub provenance: Provenance,
}

impl FactorizationResult {
    /// The operator `A ↦ W (H ∘ A) Wᵗ` rebuilt from the factors.
    pub fn operator(&self) -> OperatorMatrix {
        hadamard_congruence_unchecked(&self.w, &self.h)
    }

    pub fn apply(&self, a: &SymMatrix) -> Result<SymMatrix> {
        self.h.hadamard(a)?.congruence(&self.w)
    }

    pub fn h_rank(&self, tol: &ToleranceConfig) -> Result<usize> {
        rank(&self.h, tol)
    }

    fn structural_limit(&self, tol: &ToleranceConfig) -> f64 {
        tol.tol_residual.max(self.provenance.noise_floor)
    }
}

/// `rank T(E_kk)` for each `k`.
pub fn image_ranks(t: &OperatorMatrix, tol: &ToleranceConfig) -> Result<Vec<usize>> {
    (0..t.n())
        .map(|k| rank(&t.apply(&basis_element(t.n(), k, k)?)?, tol))
        .collect()
}

/// Largest `‖T(B) − S(B)‖_F / max(1, ‖T(B)‖_F)` over the basis elements `B`.
pub fn basis_residual(
    t: &OperatorMatrix,
    mut s: impl FnMut(&SymMatrix) -> Result<SymMatrix>,
) -> Result<f64> {
    let n = t.n();
    let mut worst = 0.0f64;
    for (i, j) in BasisIndexing::new(n).pairs() {
        let b = basis_element(n, i, j)?;
        let target = t.apply(&b)?;
        let diff = target.add_scaled(-1.0, &s(&b)?)?.frobenius_norm();
        worst = worst.max(diff / target.frobenius_norm().max(1.0));
    }
    Ok(worst)
}

pub fn factorize_hadamard(
    t: &OperatorMatrix,
    tol: &ToleranceConfig,
) -> Result<FactorizationResult> {
    tol.validate()?;
    let n = t.n();

    // T(I) must be positive definite
    let t_id = t.apply(&SymMatrix::identity(n))?;
    if !is_pd(&t_id, tol).unwrap_or(false) {
        return Err(Error::IdentityImageNotPd);
    }
    let id_eigen = symmetric_eigen(&t_id, tol)?;
    let condition = id_eigen.values[0] / id_eigen.min_value();
    let noise_floor = NOISE_FACTOR * n as f64 * f64::EPSILON * condition;
    let limit = tol.tol_residual.max(noise_floor);

    for (index, r) in image_ranks(t, tol)?.into_iter().enumerate() {
        if r != 1 {
            return Err(Error::ImageRank { index, rank: r });
        }
    }

    // T₁(A) = W₁⁻¹ T(A) W₁⁻ᵗ, normalized so that T₁(I) = I
    let w1 = pd_square_root_factor(&t_id, tol)?;
    let w1_inv = w1
        .solve_lower_triangular(&Matrix::identity(n, n))
        .ok_or_else(|| Error::Internal("Cholesky factor of T(I) is singular".into()))?;
    let t1 = |a: &SymMatrix| -> Result<SymMatrix> { t.apply(a)?.congruence(&w1_inv) };

    // T₁(E_ii) = uᵢ uᵢᵗ with {uᵢ} orthonormal
    let mut w2 = Matrix::zeros(n, n);
    for i in 0..n {
        let image = t1(&basis_element(n, i, i)?)?;
        let e = symmetric_eigen(&image, tol)?;
        if !(e.values[0] > 0.0) {
            return Err(Error::ImageRank { index: i, rank: 0 });
        }
        let mut u = DVector::from_vec(e.vector(0)) * e.values[0].sqrt();
        let cutoff = tol.tol_zero * u.norm();
        if let Some(first) = u.iter().find(|v| v.abs() > cutoff) {
            if *first < 0.0 {
                u = -u;
            }
        }
        w2.set_column(i, &u);
    }
    let frame = &w2 * w2.transpose();
    let deviation = (frame - Matrix::identity(n, n)).norm() / (n as f64).sqrt();
    if deviation > limit {
        return Err(Error::NotOrthonormal { deviation });
    }

    // T₂(A) = W₂ᵗ T₁(A) W₂ fixes every E_ii and scales E_ij + E_ji by h_ij
    let w2t = w2.transpose();
    let t2 = |a: &SymMatrix| -> Result<SymMatrix> { t1(a)?.congruence(&w2t) };
    let mut h_raw = Matrix::identity(n, n);
    for i in 0..n {
        for j in (i + 1)..n {
            let m = t2(&basis_element(n, i, j)?)?;
            let mut magnitude = 0.0f64;
            for r in 0..n {
                for c in r..n {
                    if (r, c) != (i, j) {
                        magnitude = magnitude.max(m.get(r, c).abs());
                    }
                }
            }
            if magnitude > limit * m.frobenius_norm().max(1.0) {
                return Err(Error::OffSupport {
                    i: i + 1,
                    j: j + 1,
                    magnitude,
                });
            }
            h_raw[(i, j)] = m.get(i, j);
            h_raw[(j, i)] = m.get(i, j);
        }
    }
    let h_raw = SymMatrix::symmetric_part(&h_raw);
    let h = clean_unit_diagonal_psd(&h_raw, n as f64 * noise_floor, tol)?;

    let w = &w1 * &w2;
    let residual = basis_residual(t, |b| h.hadamard(b)?.congruence(&w))?;
    if residual > tol.tol_residual {
        return Err(Error::ResidualTooLarge {
            residual,
            limit: tol.tol_residual,
        });
    }

    let mut result = FactorizationResult {
        w,
        h,
        residual,
        standard: None,
        provenance: Provenance {
            w1,
            w2,
            condition,
            noise_floor,
        },
    };
    if result.h_rank(tol)? == 1 {
        let mut standard = reduce_to_standard(&result, tol)?;
        standard.residual = basis_residual(t, |b| b.congruence(&standard.w_std))?;
        if standard.residual > tol.tol_residual {
            return Err(Error::ResidualTooLarge {
                residual: standard.residual,
                limit: tol.tol_residual,
            });
        }
        result.standard = Some(standard);
    }
    Ok(result)
}

/// Drops eigenvalues of `h` within the noise floor and restores a unit
/// diagonal; fails if an eigenvalue is negative beyond that floor.
fn clean_unit_diagonal_psd(h: &SymMatrix, noise: f64, tol: &ToleranceConfig) -> Result<SymMatrix> {
    let n = h.n();
    let e = symmetric_eigen(h, tol)?;
    let tau = eigen_threshold(&e, tol).max(noise);
    if e.min_value() < -tau {
        return Err(Error::HNotPsd {
            min_eigenvalue: e.min_value(),
        });
    }
    let mut kept = SymMatrix::zeros(n);
    for (k, &lambda) in e.values.iter().enumerate() {
        if lambda > tau {
            let v: Vec<f64> = e.vector(k).iter().map(|c| c * lambda.sqrt()).collect();
            kept = &kept + &SymMatrix::outer(&v);
        }
    }
    let diag = kept.diagonal();
    if let Some((i, d)) = diag.iter().enumerate().find(|(_, d)| !(**d > 0.0)) {
        return Err(Error::Internal(format!(
            "cleaned H has diagonal entry {d:e} at index {i}"
        )));
    }
    let s: Vec<f64> = diag.iter().map(|d| 1.0 / d.sqrt()).collect();
    Ok(SymMatrix::from_fn(n, |i, j| {
        if i == j {
            1.0
        } else {
            kept.get(i, j) * s[i] * s[j]
        }
    }))
}

/// Rewrites a factorization with `H = u uᵗ`, `uᵢ = ±1`, as `W_std = W diag(u)`.
///
/// The returned residual compares the single congruence against the
/// factorization's own operator on every basis element.
pub fn reduce_to_standard(f: &FactorizationResult, tol: &ToleranceConfig) -> Result<StandardForm> {
    let n = f.h.n();
    let e = symmetric_eigen(&f.h, tol)?;
    let r = inertia_of(&e, tol).rank();
    if r != 1 {
        return Err(Error::HRank {
            rank: r,
            expected: "the standard form needs rank(H)=1",
        });
    }
    let limit = f.structural_limit(tol);
    let lambda = e.values[0];
    let u: Vec<f64> = e.vector(0).iter().map(|c| c * lambda.sqrt()).collect();
    for (i, value) in u.iter().enumerate() {
        if (value.abs() - 1.0).abs() > limit {
            return Err(Error::SignMagnitude {
                index: i + 1,
                magnitude: value.abs(),
            });
        }
    }
    let first = Sign::of(u[0]).as_f64();
    let signs: Vec<Sign> = u.iter().map(|v| Sign::of(v * first)).collect();
    let mut w_std = f.w.clone();
    for (k, s) in signs.iter().enumerate() {
        if *s == Sign::Minus {
            w_std.column_mut(k).neg_mut();
        }
    }
    let own = f.operator();
    let residual = basis_residual(&own, |b| b.congruence(&w_std))?;
    if residual > tol.tol_residual {
        return Err(Error::ResidualTooLarge {
            residual,
            limit: tol.tol_residual,
        });
    }
    debug_assert_eq!(signs.len(), n);
    Ok(StandardForm {
        w_std,
        signs,
        residual,
    })
}

/// Singular PSD matrix `A` of rank `n−1` whose image `W (H ∘ A) Wᵗ` is
/// positive definite, for a factorization with `rank(H) >= 2`.
///
/// `H` is peeled into `x xᵗ + B` with `x` entrywise nonzero; `y` runs over the
/// rank-one terms of `B` (largest first) until [`rank_deficient_witness`]
/// yields a matrix whose image is definite. Since `H − x xᵗ − y yᵗ` is PSD,
/// `A ∘ H ≥ A ∘ (x xᵗ + y yᵗ) > 0`.
pub fn singular_pd_witness(f: &FactorizationResult, tol: &ToleranceConfig) -> Result<SymMatrix> {
    let r = f.h_rank(tol)?;
    if r < 2 {
        return Err(Error::HRank {
            rank: r,
            expected: "no singular witness exists for a standard-form operator",
        });
    }
    let peel = peel_dense_rank1(&f.h, tol).map_err(|e| Error::Witness {
        stage: "peel",
        reason: e.to_string(),
    })?;
    let terms = signed_rank1_decomp(&peel.remainder, tol)
        .map_err(|e| Error::Witness {
            stage: "remainder",
            reason: e.to_string(),
        })?
        .terms;
    if terms.is_empty() {
        return Err(Error::Witness {
            stage: "remainder",
            reason: "peeled remainder vanished".into(),
        });
    }
    let mut last = String::new();
    for term in &terms {
        match rank_deficient_witness(&peel.x, &term.vector, tol) {
            Ok(a) => match is_pd(&f.apply(&a)?, tol) {
                Ok(true) => return Ok(a),
                Ok(false) => last = "image is not positive definite".into(),
                Err(e) => last = e.to_string(),
            },
            Err(e) => last = e.to_string(),
        }
    }
    Err(Error::Witness {
        stage: "image",
        reason: last,
    })
}
