//! Sampled preservation checks and the classification pipeline.
//!
//! Positive-definiteness preservation is a universally quantified property:
//! sampling can refute it but never establish it. Every sampled outcome here
//! is labeled [`Evidence::Sampled`]; only checks decided from the
//! factorization itself are [`Evidence::Structural`].
//!
//! Sample `k` of a check draws from `split_seed(split_seed(seed, check), k)`,
//! so results do not depend on evaluation order.

use std::fmt;

use crate::decompositions::pd_square_root_factor;
use crate::definiteness::{is_pd, is_psd, rank};
use crate::error::{Error, Result};
use crate::factorization::{
    factorize_hadamard, image_ranks, singular_pd_witness, FactorizationResult,
};
use crate::operator::OperatorMatrix;
use crate::random::{
    random_pd, random_psd_of_rank, random_signed_of_rank, random_symmetric, split_seed,
};
use crate::symmetric::{Matrix, SymMatrix};
use crate::tolerance::ToleranceConfig;

/// Default number of samples per check.
pub const DEFAULT_SAMPLES: usize = 200;

const STREAM_PD: u64 = 0;
const STREAM_PSD: u64 = 1;
const STREAM_NON_PD: u64 = 2;
const STREAM_SINGULAR: u64 = 3;
const STREAM_SINGULAR_PSD: u64 = 4;

fn sample_seed(master: u64, stream: u64, k: usize) -> u64 {
    split_seed(split_seed(master, stream), k as u64)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Evidence {
    Sampled,
    Structural,
}

impl fmt::Display for Evidence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Evidence::Sampled => "sampled",
            Evidence::Structural => "structural",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
        })
    }
}

/// One finding of a report.
#[derive(Clone, Debug)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub status: Status,
    pub evidence: Evidence,
    pub samples: usize,
    pub passed: usize,
    /// Samples whose verdict could not be decided at the configured tolerance.
    pub indeterminate: usize,
    pub counterexample: Option<SymMatrix>,
    pub note: String,
}

impl CheckOutcome {
    fn structural(name: &'static str, holds: bool, note: String) -> Self {
        Self {
            name,
            status: if holds { Status::Pass } else { Status::Fail },
            evidence: Evidence::Structural,
            samples: 0,
            passed: 0,
            indeterminate: 0,
            counterexample: None,
            note,
        }
    }
}

/// Runs `samples` draws of a sampled check. `probe` returns `Ok(true)` when
/// the property holds for the draw, `Ok(false)` for a counterexample, and
/// [`Error::InconsistentDefiniteness`] when the draw sits too close to the
/// boundary to decide.
fn run_sampled(
    name: &'static str,
    samples: usize,
    mut draw: impl FnMut(usize) -> Result<SymMatrix>,
    mut probe: impl FnMut(&SymMatrix) -> Result<bool>,
) -> Result<CheckOutcome> {
    let mut out = CheckOutcome {
        name,
        status: Status::Pass,
        evidence: Evidence::Sampled,
        samples,
        passed: 0,
        indeterminate: 0,
        counterexample: None,
        note: String::new(),
    };
    for k in 0..samples {
        let a = draw(k)?;
        match probe(&a) {
            Ok(true) => out.passed += 1,
            Ok(false) => {
                out.status = Status::Fail;
                if out.counterexample.is_none() {
                    out.counterexample = Some(a);
                }
            }
            Err(Error::InconsistentDefiniteness { .. }) => out.indeterminate += 1,
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct PreservationReport {
    pub pd: CheckOutcome,
    pub psd: CheckOutcome,
}

impl PreservationReport {
    pub fn passes(&self) -> bool {
        self.pd.status == Status::Pass && self.psd.status == Status::Pass
    }
}

/// Tests definiteness of images after the congruence `X ↦ L⁻¹ X L⁻ᵗ`, with
/// `L Lᵗ = T(I)`. Inertia is congruence-invariant, and in this frame the
/// verdict no longer inherits the condition number of `T(I)`.
struct NormalizedFrame {
    l_inv: Matrix,
}

impl NormalizedFrame {
    /// `None` when `T(I)` itself is not positive definite.
    fn new(t: &OperatorMatrix, tol: &ToleranceConfig) -> Result<Option<Self>> {
        let t_id = t.apply(&SymMatrix::identity(t.n()))?;
        if !is_pd(&t_id, tol).unwrap_or(false) {
            return Ok(None);
        }
        let l = pd_square_root_factor(&t_id, tol)?;
        let n = t.n();
        let l_inv = l
            .solve_lower_triangular(&Matrix::identity(n, n))
            .ok_or_else(|| Error::Internal("Cholesky factor of T(I) is singular".into()))?;
        Ok(Some(Self { l_inv }))
    }

    fn image_is_pd(
        &self,
        t: &OperatorMatrix,
        a: &SymMatrix,
        tol: &ToleranceConfig,
    ) -> Result<bool> {
        is_pd(&t.apply(a)?.congruence(&self.l_inv)?, tol)
    }
}

/// Sampled evidence that `T` maps PD to PD and PSD to PSD.
///
/// The identity is probed first; if `T(I)` is not positive definite, `I` is
/// the counterexample and no PD samples are drawn. Otherwise PD images are
/// judged in the frame normalized by `T(I)`. PSD images are judged as is.
pub fn verify_pd_preservation(
    t: &OperatorMatrix,
    samples: usize,
    seed: u64,
    tol: &ToleranceConfig,
) -> Result<PreservationReport> {
    if samples == 0 {
        return Err(Error::Precondition("samples must be at least 1".into()));
    }
    tol.validate()?;
    let n = t.n();
    let pd = match NormalizedFrame::new(t, tol)? {
        Some(frame) => run_sampled(
            "pd_preservation",
            samples,
            |k| random_pd(n, sample_seed(seed, STREAM_PD, k)),
            |a| frame.image_is_pd(t, a, tol),
        )?,
        None => CheckOutcome {
            name: "pd_preservation",
            status: Status::Fail,
            evidence: Evidence::Sampled,
            samples,
            passed: 0,
            indeterminate: 0,
            counterexample: Some(SymMatrix::identity(n)),
            note: "image of the identity is not positive definite".into(),
        },
    };
    let psd = run_sampled(
        "psd_preservation",
        samples,
        |k| random_psd_of_rank(n, 1 + k % n, sample_seed(seed, STREAM_PSD, k)),
        |a| is_psd(&t.apply(a)?, tol),
    )?;
    Ok(PreservationReport { pd, psd })
}

/// Outcomes of the four equivalent conditions for the standard form.
#[derive(Clone, Debug)]
pub struct CorollaryReport {
    pub checks: Vec<CheckOutcome>,
}

impl CorollaryReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.status == Status::Pass)
    }

    pub fn get(&self, name: &str) -> Option<&CheckOutcome> {
        self.checks.iter().find(|c| c.name == name)
    }
}

pub const CHECK_INVERSE_PD: &str = "inverse_pd";
pub const CHECK_SINGULARITY: &str = "singularity";
pub const CHECK_SINGULAR_PSD: &str = "singular_psd";
pub const CHECK_SURJECTIVE: &str = "surjective_pd";

/// Non-PD draw: even `k` gives a singular PSD matrix, odd `k` a random
/// symmetric matrix, negated if it happens to be PD.
fn draw_non_pd(n: usize, k: usize, seed: u64, tol: &ToleranceConfig) -> Result<SymMatrix> {
    if k.is_multiple_of(2) {
        draw_singular_psd(n, k / 2, seed)
    } else {
        let a = random_symmetric(n, seed);
        Ok(if is_pd(&a, tol).unwrap_or(false) {
            -&a
        } else {
            a
        })
    }
}

fn draw_singular_psd(n: usize, k: usize, seed: u64) -> Result<SymMatrix> {
    if n == 1 {
        return Ok(SymMatrix::zeros(1));
    }
    random_psd_of_rank(n, 1 + k % (n - 1), seed)
}

fn draw_singular(n: usize, k: usize, seed: u64) -> Result<SymMatrix> {
    if n == 1 {
        return Ok(SymMatrix::zeros(1));
    }
    random_signed_of_rank(n, 1 + k % (n - 1), seed)
}

/// Sampled evidence for the conditions equivalent to `T` being a single
/// congruence:
///
/// - `inverse_pd`: non-PD inputs have non-PD images. When the factorization
///   has `rank(H) >= 2`, the singular witness is checked first and reported
///   as the counterexample.
/// - `singularity`: singular inputs have singular images.
/// - `singular_psd`: singular PSD inputs have singular PSD images.
/// - `surjective_pd`: decided structurally, holds iff the factorization
///   reduces to a standard form.
///
/// Requires the sampled PD-preservation check to pass on the same budget.
pub fn check_corollary_equivalences(
    t: &OperatorMatrix,
    samples: usize,
    seed: u64,
    tol: &ToleranceConfig,
) -> Result<CorollaryReport> {
    let preservation = verify_pd_preservation(t, samples, seed, tol)?;
    if !preservation.passes() {
        return Err(Error::Precondition(
            "operator fails the sampled PD preservation check".into(),
        ));
    }
    let n = t.n();
    let factorization = factorize_hadamard(t, tol);

    let witness = match &factorization {
        Ok(f) if f.standard.is_none() => singular_pd_witness(f, tol).ok(),
        _ => None,
    };
    let mut inverse = run_sampled(
        CHECK_INVERSE_PD,
        samples,
        |k| draw_non_pd(n, k, sample_seed(seed, STREAM_NON_PD, k), tol),
        |a| Ok(!is_pd(&t.apply(a)?, tol)?),
    )?;
    if let Some(w) = witness {
        if is_pd(&t.apply(&w)?, tol).unwrap_or(false) {
            inverse.status = Status::Fail;
            inverse.counterexample = Some(w);
            inverse.note = "singular witness has a positive definite image".into();
        }
    }

    let singularity = run_sampled(
        CHECK_SINGULARITY,
        samples,
        |k| draw_singular(n, k, sample_seed(seed, STREAM_SINGULAR, k)),
        |a| Ok(rank(&t.apply(a)?, tol)? < n),
    )?;
    let singular_psd = run_sampled(
        CHECK_SINGULAR_PSD,
        samples,
        |k| draw_singular_psd(n, k, sample_seed(seed, STREAM_SINGULAR_PSD, k)),
        |a| {
            let image = t.apply(a)?;
            Ok(is_psd(&image, tol)? && rank(&image, tol)? < n)
        },
    )?;
    let surjective = match &factorization {
        Ok(f) => CheckOutcome::structural(
            CHECK_SURJECTIVE,
            f.standard.is_some(),
            if f.standard.is_some() {
                "single-congruence form maps the PD cone onto itself".into()
            } else {
                "rank(H) >= 2; image misses part of the PD cone".into()
            },
        ),
        Err(e) => CheckOutcome::structural(CHECK_SURJECTIVE, false, e.to_string()),
    };

    Ok(CorollaryReport {
        checks: vec![inverse, singularity, singular_psd, surjective],
    })
}

/// Outcome of [`classify`].
#[derive(Clone, Debug)]
pub enum PreserverVerdict {
    /// `T(A) = W_std A W_stdᵗ`; the factorization carries the standard form.
    StandardForm(FactorizationResult),
    /// `T(A) = W (H ∘ A) Wᵗ` with `rank(H) >= 2`, together with a singular PSD
    /// matrix whose image is positive definite.
    HadamardForm {
        factorization: FactorizationResult,
        witness: SymMatrix,
    },
    /// Some `T(E_kk)` does not have rank one; the ranks are listed.
    NotRankOneImages(Vec<usize>),
    /// A PD matrix whose image is not PD.
    NotPdPreserving(SymMatrix),
    Inconclusive(String),
}

impl PreserverVerdict {
    pub fn tag(&self) -> &'static str {
        match self {
            PreserverVerdict::StandardForm(_) => "STANDARD_FORM",
            PreserverVerdict::HadamardForm { .. } => "HADAMARD_FORM",
            PreserverVerdict::NotRankOneImages(_) => "NOT_RANK_ONE_IMAGES",
            PreserverVerdict::NotPdPreserving(_) => "NOT_PD_PRESERVING",
            PreserverVerdict::Inconclusive(_) => "INCONCLUSIVE",
        }
    }
}

/// Turns a PSD counterexample into a PD one: `A + εI` for decreasing `ε`.
fn lift_psd_counterexample(
    t: &OperatorMatrix,
    a: &SymMatrix,
    tol: &ToleranceConfig,
) -> Option<SymMatrix> {
    let n = a.n();
    let scale = a.max_abs().max(1.0);
    (1..=12).find_map(|k| {
        let eps = scale * 10f64.powi(-k);
        let lifted = a.add_scaled(eps, &SymMatrix::identity(n)).ok()?;
        let lifted_pd = is_pd(&lifted, tol).ok()?;
        let image_pd = is_pd(&t.apply(&lifted).ok()?, tol).ok()?;
        (lifted_pd && !image_pd).then_some(lifted)
    })
}

/// Classifies a linear map on symmetric matrices:
///
/// 1. sampled PD preservation, else [`PreserverVerdict::NotPdPreserving`];
/// 2. ranks of `T(E_kk)`, else [`PreserverVerdict::NotRankOneImages`];
/// 3. Hadamard-congruence factorization, else
///    [`PreserverVerdict::Inconclusive`] with the failing step;
/// 4. [`PreserverVerdict::StandardForm`] when `rank(H) = 1`, otherwise
///    [`PreserverVerdict::HadamardForm`] with its singular witness.
///
/// Deterministic in `(t, samples, seed, tol)`.
pub fn classify(
    t: &OperatorMatrix,
    samples: usize,
    seed: u64,
    tol: &ToleranceConfig,
) -> PreserverVerdict {
    match classify_inner(t, samples, seed, tol) {
        Ok(v) => v,
        Err(e) => PreserverVerdict::Inconclusive(e.to_string()),
    }
}

fn classify_inner(
    t: &OperatorMatrix,
    samples: usize,
    seed: u64,
    tol: &ToleranceConfig,
) -> Result<PreserverVerdict> {
    let report = verify_pd_preservation(t, samples, seed, tol)?;
    if let Some(a) = &report.pd.counterexample {
        return Ok(PreserverVerdict::NotPdPreserving(a.clone()));
    }
    if let Some(a) = &report.psd.counterexample {
        return Ok(match lift_psd_counterexample(t, a, tol) {
            Some(lifted) => PreserverVerdict::NotPdPreserving(lifted),
            None => PreserverVerdict::Inconclusive(
                "maps a PSD sample outside the PSD cone, but no PD counterexample was isolated"
                    .into(),
            ),
        });
    }
    let ranks = image_ranks(t, tol)?;
    if ranks.iter().any(|&r| r != 1) {
        return Ok(PreserverVerdict::NotRankOneImages(ranks));
    }
    let f = match factorize_hadamard(t, tol) {
        Ok(f) => f,
        Err(Error::IdentityImageNotPd) => {
            return Ok(PreserverVerdict::NotPdPreserving(SymMatrix::identity(
                t.n(),
            )))
        }
        Err(e) => return Ok(PreserverVerdict::Inconclusive(e.to_string())),
    };
    if f.standard.is_some() {
        return Ok(PreserverVerdict::StandardForm(f));
    }
    Ok(match singular_pd_witness(&f, tol) {
        Ok(witness) => PreserverVerdict::HadamardForm {
            factorization: f,
            witness,
        },
        Err(e) => PreserverVerdict::Inconclusive(e.to_string()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::{op_from_congruences, op_from_hadamard_congruence};
    use crate::random::{random_invertible, random_unit_diag_psd};

    fn tol() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    #[test]
    fn identity_passes_everything() {
        let t = OperatorMatrix::identity(3);
        let r = verify_pd_preservation(&t, 50, 1, &tol()).unwrap();
        assert!(r.passes());
        assert_eq!(r.pd.passed, 50);
        let c = check_corollary_equivalences(&t, 50, 1, &tol()).unwrap();
        assert!(c.all_pass(), "{c:?}");
        assert!(matches!(
            classify(&t, 50, 1, &tol()),
            PreserverVerdict::StandardForm(_)
        ));
    }

    #[test]
    fn negation_fails_on_first_sample() {
        let t = OperatorMatrix::negation(3);
        let r = verify_pd_preservation(&t, 10, 0, &tol()).unwrap();
        assert_eq!(r.pd.status, Status::Fail);
        assert_eq!(r.pd.passed, 0);
        let a = r.pd.counterexample.unwrap();
        assert!(is_pd(&a, &tol()).unwrap());
        assert!(!is_pd(&t.apply(&a).unwrap(), &tol()).unwrap());
        assert!(matches!(
            classify(&t, 10, 0, &tol()),
            PreserverVerdict::NotPdPreserving(_)
        ));
        assert!(check_corollary_equivalences(&t, 10, 0, &tol()).is_err());
    }

    #[test]
    fn hadamard_form_fails_inverse_condition_with_witness() {
        let h = random_unit_diag_psd(4, 2, 3).unwrap();
        let w = random_invertible(4, 4, 1e4).unwrap();
        let t = op_from_hadamard_congruence(&w, &h).unwrap();
        let c = check_corollary_equivalences(&t, 40, 2, &tol()).unwrap();
        let inv = c.get(CHECK_INVERSE_PD).unwrap();
        assert_eq!(inv.status, Status::Fail);
        let a = inv.counterexample.as_ref().unwrap();
        assert_eq!(rank(a, &tol()).unwrap(), 3);
        assert!(is_pd(&t.apply(a).unwrap(), &tol()).unwrap());
        assert_eq!(c.get(CHECK_SURJECTIVE).unwrap().status, Status::Fail);
        match classify(&t, 40, 2, &tol()) {
            PreserverVerdict::HadamardForm { witness, .. } => assert_eq!(&witness, a),
            other => panic!("unexpected {}", other.tag()),
        }
    }

    #[test]
    fn sum_of_congruences_reports_ranks() {
        let ws: Vec<Matrix> = (0..2)
            .map(|s| random_invertible(3, s, 1e4).unwrap())
            .collect();
        let t = op_from_congruences(&ws).unwrap();
        assert!(verify_pd_preservation(&t, 50, 0, &tol()).unwrap().passes());
        match classify(&t, 50, 0, &tol()) {
            PreserverVerdict::NotRankOneImages(r) => assert_eq!(r, vec![2, 2, 2]),
            other => panic!("unexpected {}", other.tag()),
        }
    }

    #[test]
    fn psd_violation_is_lifted_to_pd_counterexample() {
        // T(A) = A + a₁₂ E₁₁ sends [[1,-1],[-1,1]] to [[0,-1],[-1,1]]
        let mut m = OperatorMatrix::identity(2).matrix().clone();
        m[(0, 2)] = 1.0;
        let t = OperatorMatrix::new(2, m).unwrap();
        let a = SymMatrix::outer(&[1.0, -1.0]);
        let lifted = lift_psd_counterexample(&t, &a, &tol()).unwrap();
        assert!(is_pd(&lifted, &tol()).unwrap());
        assert!(!is_pd(&t.apply(&lifted).unwrap(), &tol()).unwrap());
    }

    #[test]
    fn zero_samples_rejected() {
        assert!(verify_pd_preservation(&OperatorMatrix::identity(2), 0, 0, &tol()).is_err());
    }

    #[test]
    fn order_one_operators() {
        let t = OperatorMatrix::new(1, Matrix::from_element(1, 1, 3.0)).unwrap();
        assert!(matches!(
            classify(&t, 20, 0, &tol()),
            PreserverVerdict::StandardForm(_)
        ));
        assert!(check_corollary_equivalences(&t, 20, 0, &tol())
            .unwrap()
            .all_pass());
    }
}
