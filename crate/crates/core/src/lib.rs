//! Positive-definite preserving linear maps on real symmetric matrices.
//!
//! The crate recovers the Hadamard-congruence form `T(A) = W (H ∘ A) Wᵗ` of
//! a linear map that preserves positive definiteness and sends every `E_ii`
//! to a rank-one matrix, reduces it to a single congruence `T(A) = W A Wᵗ`
//! when `rank H = 1`, and otherwise builds a singular PSD matrix whose image
//! is positive definite.
//!
//! Layout:
//! - [`symmetric`], [`jacobi`], [`definiteness`]: the packed symmetric value
//!   type and tolerance-aware spectral tests.
//! - [`decompositions`]: spectral, signed rank-one, congruence and
//!   square-root factorizations, the dense rank-one peel and the
//!   rank-deficient Hadamard witness.
//! - [`operator`], [`random`]: linear maps as coordinate matrices, the
//!   operator families and seeded generators.
//! - [`factorization`], [`verification`]: the factorization pipeline,
//!   sampled preservation checks and classification.
//! - [`textio`]: the matrix and operator text formats.

// `!(x > limit)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod decompositions;
pub mod definiteness;
pub mod error;
pub mod factorization;
pub mod jacobi;
pub mod operator;
pub mod random;
pub mod symmetric;
pub mod textio;
pub mod tolerance;
pub mod verification;

#[cfg(feature = "cli")]
pub mod cli;

pub use definiteness::{inertia, is_pd, is_psd, rank, InertiaTriple};
pub use error::{Error, Result};
pub use operator::OperatorMatrix;
pub use symmetric::{Matrix, SymMatrix};
pub use tolerance::ToleranceConfig;
