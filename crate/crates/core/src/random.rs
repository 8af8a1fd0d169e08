//! Seeded generators for matrices and operators.
//!
//! Every generator is a pure function of its parameters and a `u64` seed.
//! Independent sub-streams come from [`split_seed`], which selects a ChaCha
//! stream by index, so sample `k` of a sampling loop never depends on how
//! many draws earlier samples consumed.

use nalgebra::SVD;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::symmetric::{Matrix, SymMatrix};

/// Condition cap used by [`random_pd`] for its square-root factor.
pub const RANDOM_PD_COND_CAP: f64 = 1e2;
/// Condition cap on the stacked vectors of [`random_psd_of_rank`].
pub const RANDOM_PSD_COND_CAP: f64 = 1e3;
const MAX_ATTEMPTS: usize = 10_000;

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Seed for the `k`-th independent sub-stream of `master`.
pub fn split_seed(master: u64, k: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(k);
    rng.next_u64()
}

pub fn gaussian_vector(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    (0..n)
        .map(|_| rng.sample::<f64, _>(StandardNormal))
        .collect()
}

pub fn gaussian_matrix(rng: &mut impl Rng, rows: usize, cols: usize) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| rng.sample::<f64, _>(StandardNormal))
}

/// Ratio of extreme singular values; infinite for rank-deficient input.
pub fn condition_number(m: &Matrix) -> f64 {
    let sv = SVD::new(m.clone(), false, false).singular_values;
    let max = sv.iter().fold(0.0f64, |a, &b| a.max(b));
    let min = sv.iter().fold(f64::INFINITY, |a, &b| a.min(b));
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

fn draw_conditioned(rng: &mut impl Rng, rows: usize, cols: usize, cond_cap: f64) -> Result<Matrix> {
    for _ in 0..MAX_ATTEMPTS {
        let m = gaussian_matrix(rng, rows, cols);
        if condition_number(&m) <= cond_cap {
            return Ok(m);
        }
    }
    Err(Error::Precondition(format!(
        "no {rows}x{cols} Gaussian sample with condition <= {cond_cap} in {MAX_ATTEMPTS} draws"
    )))
}

/// Entrywise-Gaussian square matrix, redrawn until its condition number is at most `cond_cap`.
pub fn random_invertible(n: usize, seed: u64, cond_cap: f64) -> Result<Matrix> {
    if n == 0 {
        return Err(Error::EmptyMatrix);
    }
    if !(cond_cap > 1.0) {
        return Err(Error::Precondition(format!(
            "condition cap must exceed 1, got {cond_cap}"
        )));
    }
    draw_conditioned(&mut rng_from_seed(seed), n, n, cond_cap)
}

/// `W Wᵗ` for a random invertible `W` with condition at most [`RANDOM_PD_COND_CAP`].
pub fn random_pd(n: usize, seed: u64) -> Result<SymMatrix> {
    let w = random_invertible(n, seed, RANDOM_PD_COND_CAP)?;
    Ok(gram(&w))
}

/// `Σ_{i<r} xᵢ xᵢᵗ` for `r` linearly independent Gaussian vectors.
pub fn random_psd_of_rank(n: usize, r: usize, seed: u64) -> Result<SymMatrix> {
    check_rank(n, r)?;
    let x = draw_conditioned(&mut rng_from_seed(seed), n, r, RANDOM_PSD_COND_CAP)?;
    Ok(gram(&x))
}

/// Unit-diagonal PSD matrix of rank `r`: `D^{-1/2} M D^{-1/2}` with `M` from
/// [`random_psd_of_rank`] and `D = diag(M)`. The diagonal is set to exactly 1.
pub fn random_unit_diag_psd(n: usize, r: usize, seed: u64) -> Result<SymMatrix> {
    let mut rng = rng_from_seed(seed);
    for _ in 0..MAX_ATTEMPTS {
        let m = random_psd_of_rank(n, r, rng.next_u64())?;
        let d = m.diagonal();
        if d.iter().all(|&v| v > 1e-6) {
            let s: Vec<f64> = d.iter().map(|v| 1.0 / v.sqrt()).collect();
            return Ok(SymMatrix::from_fn(n, |i, j| {
                if i == j {
                    1.0
                } else {
                    m.get(i, j) * s[i] * s[j]
                }
            }));
        }
    }
    Err(Error::Precondition(
        "could not draw a PSD matrix with positive diagonal".into(),
    ))
}

/// Symmetric matrix with independent standard-normal upper-triangle entries.
pub fn random_symmetric(n: usize, seed: u64) -> SymMatrix {
    let mut rng = rng_from_seed(seed);
    SymMatrix::from_fn(n, |_, _| rng.sample::<f64, _>(StandardNormal))
}

/// `Σ_{i<r} kᵢ xᵢ xᵢᵗ` with random signs `kᵢ`; rank exactly `r` when the `xᵢ`
/// are independent, which the conditioned draw guarantees.
pub fn random_signed_of_rank(n: usize, r: usize, seed: u64) -> Result<SymMatrix> {
    check_rank(n, r)?;
    let mut rng = rng_from_seed(seed);
    let x = draw_conditioned(&mut rng, n, r, RANDOM_PSD_COND_CAP)?;
    let signs: Vec<f64> = (0..r)
        .map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 })
        .collect();
    Ok(SymMatrix::from_fn(n, |i, j| {
        (0..r).map(|k| signs[k] * x[(i, k)] * x[(j, k)]).sum()
    }))
}

fn check_rank(n: usize, r: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::EmptyMatrix);
    }
    if r == 0 || r > n {
        return Err(Error::Precondition(format!(
            "rank {r} infeasible for order {n}"
        )));
    }
    Ok(())
}

/// `X Xᵗ` as a symmetric matrix.
pub(crate) fn gram(x: &Matrix) -> SymMatrix {
    SymMatrix::from_fn(x.nrows(), |i, j| x.row(i).dot(&x.row(j)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::definiteness::{is_pd, is_psd, rank};
    use crate::tolerance::ToleranceConfig;

    #[test]
    fn deterministic_for_fixed_seed() {
        assert_eq!(random_pd(4, 11).unwrap(), random_pd(4, 11).unwrap());
        assert_ne!(random_pd(4, 11).unwrap(), random_pd(4, 12).unwrap());
        assert_eq!(split_seed(5, 3), split_seed(5, 3));
        assert_ne!(split_seed(5, 3), split_seed(5, 4));
        assert_ne!(split_seed(5, 3), split_seed(6, 3));
    }

    #[test]
    fn random_pd_is_pd() {
        let tol = ToleranceConfig::default();
        for seed in 0..1000 {
            let n = 1 + (seed % 10) as usize;
            assert!(
                is_pd(&random_pd(n, seed).unwrap(), &tol).unwrap(),
                "seed {seed}"
            );
        }
    }

    #[test]
    fn random_psd_of_rank_has_that_rank() {
        let tol = ToleranceConfig::default();
        for seed in 0..300 {
            let n = 1 + (seed % 8) as usize;
            let r = 1 + (seed / 8) as usize % n;
            let a = random_psd_of_rank(n, r, seed).unwrap();
            assert_eq!(rank(&a, &tol).unwrap(), r);
            assert!(is_psd(&a, &tol).unwrap());
        }
        assert!(random_psd_of_rank(3, 4, 0).is_err());
        assert!(random_psd_of_rank(3, 0, 0).is_err());
    }

    #[test]
    fn unit_diag_psd_has_unit_diagonal() {
        let tol = ToleranceConfig::default();
        for seed in 0..200 {
            let n = 1 + (seed % 7) as usize;
            let r = 1 + (seed / 7) as usize % n;
            let h = random_unit_diag_psd(n, r, seed).unwrap();
            assert!(h.diagonal().iter().all(|&d| (d - 1.0).abs() <= 1e-12));
            assert_eq!(rank(&h, &tol).unwrap(), r);
        }
    }

    #[test]
    fn invertible_respects_condition_cap() {
        for seed in 0..50 {
            let w = random_invertible(6, seed, 50.0).unwrap();
            assert!(condition_number(&w) <= 50.0);
        }
        assert!(random_invertible(3, 0, 1.0).is_err());
    }

    #[test]
    fn signed_of_rank_has_that_rank() {
        let tol = ToleranceConfig::default();
        for seed in 0..100 {
            let a = random_signed_of_rank(6, 1 + (seed % 5) as usize, seed).unwrap();
            assert_eq!(rank(&a, &tol).unwrap(), 1 + (seed % 5) as usize);
        }
    }
}
