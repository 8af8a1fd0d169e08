//! Browser bindings for three `sympreserve` operations.
//!
//! Each export takes plain strings and numbers and returns a JSON string;
//! failures come back as `{"error": "..."}` rather than exceptions, so the
//! page only ever has to `JSON.parse` the result.

use serde_json::{json, Value};
use sympreserve::decompositions::{self, spectral};
use sympreserve::factorization::FactorizationResult;
use sympreserve::operator::{op_from_congruences, op_from_hadamard_congruence, OperatorMatrix};
use sympreserve::random::{random_invertible, random_unit_diag_psd, split_seed};
use sympreserve::textio::parse_symmetric;
use sympreserve::verification::{classify, PreserverVerdict};
use sympreserve::{inertia, is_pd, rank, Matrix, Result, SymMatrix, ToleranceConfig};
use wasm_bindgen::prelude::wasm_bindgen;

/// Largest order the page accepts; keeps every call well under a second.
pub const MAX_ORDER: usize = 8;
const MAX_SAMPLES: usize = 1000;
const COND_CAP: f64 = 1e3;

fn rows_sym(a: &SymMatrix) -> Value {
    let n = a.n();
    json!((0..n)
        .map(|i| (0..n).map(|j| a.get(i, j)).collect::<Vec<_>>())
        .collect::<Vec<_>>())
}

fn rows_dense(m: &Matrix) -> Value {
    json!((0..m.nrows())
        .map(|i| m.row(i).iter().copied().collect::<Vec<_>>())
        .collect::<Vec<_>>())
}

fn render(result: Result<Value>) -> String {
    result
        .unwrap_or_else(|e| json!({ "error": e.to_string() }))
        .to_string()
}

fn precondition(message: String) -> sympreserve::Error {
    sympreserve::Error::Precondition(message)
}

fn min_eigenvalue(a: &SymMatrix, tol: &ToleranceConfig) -> Result<f64> {
    Ok(spectral(a, tol)?.lambda.last().copied().unwrap_or(0.0))
}

/// Operator of the requested family; `h_rank` only matters for `hadamard`.
pub fn generate_operator(kind: &str, n: usize, h_rank: usize, seed: u64) -> Result<OperatorMatrix> {
    if n == 0 || n > MAX_ORDER {
        return Err(precondition(format!(
            "order must be between 1 and {MAX_ORDER}"
        )));
    }
    let factor = |k: u64| random_invertible(n, split_seed(seed, k), COND_CAP);
    match kind {
        "congruence" => op_from_congruences(&[factor(0)?]),
        "hadamard" => {
            let h = random_unit_diag_psd(n, h_rank.clamp(1, n), split_seed(seed, 1))?;
            op_from_hadamard_congruence(&factor(0)?, &h)
        }
        "sum" => op_from_congruences(&[factor(0)?, factor(1)?]),
        other => Err(precondition(format!("unknown operator family {other:?}"))),
    }
}

fn factorization_json(f: &FactorizationResult) -> Value {
    json!({ "w": rows_dense(&f.w), "h": rows_sym(&f.h), "residual": f.residual })
}

pub fn classify_json(
    kind: &str,
    n: usize,
    h_rank: usize,
    seed: u64,
    samples: usize,
) -> Result<Value> {
    let samples = samples.clamp(1, MAX_SAMPLES);
    let tol = ToleranceConfig::default();
    let t = generate_operator(kind, n, h_rank, seed)?;
    let verdict = classify(&t, samples, seed, &tol);
    let mut out = json!({ "verdict": verdict.tag(), "n": n, "samples": samples, "seed": seed });
    let fields = out.as_object_mut().expect("object literal");
    match &verdict {
        PreserverVerdict::StandardForm(f) => {
            fields.insert("factorization".into(), factorization_json(f));
            if let Some(s) = &f.standard {
                fields.insert("signs".into(), json!(s.sign_values()));
            }
        }
        PreserverVerdict::HadamardForm {
            factorization,
            witness,
        } => {
            let image = t.apply(witness)?;
            fields.insert("factorization".into(), factorization_json(factorization));
            fields.insert("witness".into(), rows_sym(witness));
            fields.insert("witnessRank".into(), json!(rank(witness, &tol)?));
            fields.insert(
                "imageMinEigenvalue".into(),
                json!(min_eigenvalue(&image, &tol)?),
            );
        }
        PreserverVerdict::NotRankOneImages(ranks) => {
            fields.insert("imageRanks".into(), json!(ranks));
        }
        PreserverVerdict::NotPdPreserving(a) => {
            fields.insert("counterexample".into(), rows_sym(a));
        }
        PreserverVerdict::Inconclusive(reason) => {
            fields.insert("reason".into(), json!(reason));
        }
    }
    Ok(out)
}

/// Reals separated by whitespace and/or commas.
pub fn parse_vector(text: &str) -> Result<Vec<f64>> {
    text.split(|c: char| c.is_whitespace() || c == ',')
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| precondition(format!("not a finite real: {t:?}")))
        })
        .collect()
}

pub fn witness_json(x: &str, y: &str) -> Result<Value> {
    let tol = ToleranceConfig::default();
    let (x, y) = (parse_vector(x)?, parse_vector(y)?);
    if x.len() > MAX_ORDER {
        return Err(precondition(format!(
            "vectors are limited to {MAX_ORDER} entries"
        )));
    }
    let a = decompositions::rank_deficient_witness(&x, &y, &tol)?;
    let gram = &SymMatrix::outer(&x) + &SymMatrix::outer(&y);
    let product = a.hadamard(&gram)?;
    Ok(json!({
        "a": rows_sym(&a),
        "rankA": rank(&a, &tol)?,
        "gram": rows_sym(&gram),
        "product": rows_sym(&product),
        "productMinEigenvalue": min_eigenvalue(&product, &tol)?,
        "productPd": is_pd(&product, &tol)?,
    }))
}

pub fn schur_json(a: &str, b: &str) -> Result<Value> {
    let tol = ToleranceConfig::default();
    let (a, b) = (parse_symmetric(a)?, parse_symmetric(b)?);
    if a.n() > MAX_ORDER {
        return Err(precondition(format!(
            "matrices are limited to order {MAX_ORDER}"
        )));
    }
    let product = a.hadamard(&b)?;
    let describe = |m: &SymMatrix| -> Result<Value> {
        let i = inertia(m, &tol)?;
        Ok(json!({
            "inertia": [i.positive, i.negative, i.zero],
            "minEigenvalue": min_eigenvalue(m, &tol)?,
        }))
    };
    Ok(json!({
        "product": rows_sym(&product),
        "a": describe(&a)?,
        "b": describe(&b)?,
        "productInfo": describe(&product)?,
    }))
}

/// Generates an operator (`congruence`, `hadamard` or `sum`) and classifies it.
#[wasm_bindgen(js_name = classifyGenerated)]
pub fn classify_generated(
    kind: &str,
    n: usize,
    h_rank: usize,
    seed: u32,
    samples: usize,
) -> String {
    render(classify_json(kind, n, h_rank, u64::from(seed), samples))
}

/// Singular PSD `A` with `A ∘ (x xᵗ + y yᵗ)` positive definite.
#[wasm_bindgen(js_name = rankDeficientWitness)]
pub fn rank_deficient_witness(x: &str, y: &str) -> String {
    render(witness_json(x, y))
}

/// Entrywise product of two symmetric matrices in the text format, with inertias.
#[wasm_bindgen(js_name = schurProduct)]
pub fn schur_product(a: &str, b: &str) -> String {
    render(schur_json(a, b))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parsed(s: String) -> Value {
        serde_json::from_str(&s).unwrap()
    }

    #[test]
    fn classifies_each_family() {
        let v = parsed(classify_generated("congruence", 3, 1, 1, 40));
        assert_eq!(v["verdict"], "STANDARD_FORM");
        let v = parsed(classify_generated("hadamard", 4, 3, 2, 40));
        assert_eq!(v["verdict"], "HADAMARD_FORM");
        assert_eq!(v["witnessRank"], 3);
        assert!(v["imageMinEigenvalue"].as_f64().unwrap() > 0.0);
        let v = parsed(classify_generated("sum", 3, 1, 3, 40));
        assert_eq!(v["verdict"], "NOT_RANK_ONE_IMAGES");
        assert_eq!(v["imageRanks"], json!([2, 2, 2]));
    }

    #[test]
    fn bad_requests_become_error_objects() {
        assert!(parsed(classify_generated("nope", 3, 1, 0, 10))["error"].is_string());
        assert!(parsed(classify_generated("sum", 40, 1, 0, 10))["error"].is_string());
        assert!(parsed(rank_deficient_witness("1 x", "1 2"))["error"].is_string());
        assert!(parsed(schur_product("2\n1 2\n3 1", "1\n1"))["error"].is_string());
    }

    #[test]
    fn witness_hand_case() {
        let v = parsed(rank_deficient_witness("1, 1", "1, -1"));
        assert_eq!(v["product"], json!([[2.0, 0.0], [0.0, 2.0]]));
        assert_eq!(v["rankA"], 1);
        assert_eq!(v["productPd"], true);
    }

    #[test]
    fn schur_of_the_worked_example() {
        let v = parsed(schur_product("2\n1 2\n2 3", "2\n5 0\n0 7"));
        assert_eq!(v["product"], json!([[5.0, 0.0], [0.0, 21.0]]));
        assert_eq!(v["a"]["inertia"], json!([1, 1, 0]));
        assert_eq!(v["productInfo"]["inertia"], json!([2, 0, 0]));
    }
}
