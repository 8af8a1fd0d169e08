use approx::assert_relative_eq;
use proptest::prelude::*;
use sympreserve::decompositions::{signed_rank1_decomp, spectral};
use sympreserve::factorization::factorize_hadamard;
use sympreserve::jacobi::symmetric_eigen;
use sympreserve::operator::{
    from_coords, op_from_congruences, op_from_hadamard_congruence, to_coords,
};
use sympreserve::random::{
    random_invertible, random_psd_of_rank, random_unit_diag_psd, split_seed,
};
use sympreserve::textio::{parse_operator, parse_symmetric, write_operator, write_symmetric};
use sympreserve::verification::classify;
use sympreserve::{inertia, is_psd, Matrix, SymMatrix, ToleranceConfig};

fn sym(n: usize) -> impl Strategy<Value = SymMatrix> {
    prop::collection::vec(-10.0f64..10.0, n * (n + 1) / 2)
        .prop_map(move |packed| SymMatrix::from_packed(n, packed).unwrap())
}

fn sym_any() -> impl Strategy<Value = SymMatrix> {
    (1usize..=6).prop_flat_map(sym)
}

fn sym_pair() -> impl Strategy<Value = (SymMatrix, SymMatrix)> {
    (1usize..=6).prop_flat_map(|n| (sym(n), sym(n)))
}

fn sym_triple() -> impl Strategy<Value = (SymMatrix, SymMatrix, SymMatrix)> {
    (1usize..=6).prop_flat_map(|n| (sym(n), sym(n), sym(n)))
}

fn tol() -> ToleranceConfig {
    ToleranceConfig::default()
}

proptest! {
    #[test]
    fn hadamard_is_commutative((a, b) in sym_pair()) {
        prop_assert_eq!(a.hadamard(&b).unwrap(), b.hadamard(&a).unwrap());
    }

    #[test]
    fn hadamard_is_bilinear((a, b, c) in sym_triple(), alpha in -3.0f64..3.0) {
        let lhs = a.add_scaled(alpha, &b).unwrap().hadamard(&c).unwrap();
        let rhs = a.hadamard(&c).unwrap().add_scaled(alpha, &b.hadamard(&c).unwrap()).unwrap();
        prop_assert!(lhs.relative_distance(&rhs) <= 1e-12);
    }

    #[test]
    fn schur_product_of_psd_is_psd(n in 1usize..=7, r1 in 1usize..=7, r2 in 1usize..=7, seed: u64) {
        let a = random_psd_of_rank(n, 1 + (r1 - 1) % n, split_seed(seed, 0)).unwrap();
        let b = random_psd_of_rank(n, 1 + (r2 - 1) % n, split_seed(seed, 1)).unwrap();
        prop_assert!(is_psd(&a.hadamard(&b).unwrap(), &tol()).unwrap());
    }

    #[test]
    fn congruence_preserves_inertia(a in sym_any(), seed: u64) {
        let w = random_invertible(a.n(), seed, 20.0).unwrap();
        let t = tol();
        let before = inertia(&a, &t).unwrap();
        // Eigenvalues near the zero threshold can legitimately cross it under a
        // perturbation; only assert when the spectrum is well separated from it.
        let e = symmetric_eigen(&a, &t).unwrap();
        let gap = e.values.iter().map(|v| v.abs()).fold(f64::INFINITY, f64::min);
        prop_assume!(gap > 1e-6 * e.spectral_radius().max(1.0));
        prop_assert_eq!(inertia(&a.congruence(&w).unwrap(), &t).unwrap(), before);
    }

    #[test]
    fn quad_form_of_outer_product(x in prop::collection::vec(-5.0f64..5.0, 1..8), y in prop::collection::vec(-5.0f64..5.0, 8)) {
        let y = &y[..x.len()];
        let dot: f64 = x.iter().zip(y).map(|(p, q)| p * q).sum();
        assert_relative_eq!(SymMatrix::outer(y).quad_form(&x).unwrap(), dot * dot, epsilon = 1e-9, max_relative = 1e-10);
    }

    #[test]
    fn coordinates_round_trip(a in sym_any()) {
        prop_assert_eq!(from_coords(a.n(), &to_coords(&a)).unwrap(), a);
    }

    #[test]
    fn operator_application_is_linear((a, b) in sym_pair(), alpha in -3.0f64..3.0, seed: u64) {
        let n = a.n();
        let w1 = random_invertible(n, split_seed(seed, 0), 50.0).unwrap();
        let w2 = random_invertible(n, split_seed(seed, 1), 50.0).unwrap();
        let t = op_from_congruences(&[w1, w2]).unwrap();
        let lhs = t.apply(&a.add_scaled(alpha, &b).unwrap()).unwrap();
        let rhs = t.apply(&a).unwrap().add_scaled(alpha, &t.apply(&b).unwrap()).unwrap();
        prop_assert!(lhs.relative_distance(&rhs) <= 1e-12);
    }

    #[test]
    fn text_format_round_trips(a in sym_any(), seed: u64) {
        prop_assert_eq!(parse_symmetric(&write_symmetric(&a)).unwrap(), a.clone());
        let w = random_invertible(a.n(), seed, 50.0).unwrap();
        let t = op_from_congruences(&[w]).unwrap();
        prop_assert_eq!(parse_operator(&write_operator(&t)).unwrap(), t);
    }

    #[test]
    fn spectral_decomposition_is_orthonormal_and_sorted(a in sym_any()) {
        let s = spectral(&a, &tol()).unwrap();
        let n = a.n();
        prop_assert!(s.lambda.windows(2).all(|w| w[0] >= w[1]));
        let gram = &s.q * s.q.transpose();
        prop_assert!((gram - Matrix::identity(n, n)).norm() <= 1e-12 * n as f64);
        for k in 0..n {
            let row = s.q.row(k);
            let pivot = row.iter().copied().fold(0.0f64, |m, v| if v.abs() > m.abs() { v } else { m });
            prop_assert!(pivot > 0.0);
        }
        let rebuilt = s.q.transpose() * Matrix::from_diagonal(&nalgebra::DVector::from_vec(s.lambda.clone())) * &s.q;
        prop_assert!((rebuilt - a.to_dense()).norm() <= 1e-12 * a.frobenius_norm().max(1.0));
    }

    #[test]
    fn signed_rank_one_terms_rebuild_the_matrix(a in sym_any()) {
        let d = signed_rank1_decomp(&a, &tol()).unwrap();
        prop_assert!(d.reconstruct().relative_distance(&a) <= 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn factorization_rebuilds_the_operator(n in 2usize..=5, r in 1usize..=5, seed: u64) {
        let r = 1 + (r - 1) % n;
        let w = random_invertible(n, split_seed(seed, 0), 1e3).unwrap();
        let h = random_unit_diag_psd(n, r, split_seed(seed, 1)).unwrap();
        let t = op_from_hadamard_congruence(&w, &h).unwrap();
        let f = factorize_hadamard(&t, &tol()).unwrap();
        prop_assert!(f.operator().relative_distance(&t) <= 1e-8);
        prop_assert_eq!(f.standard.is_some(), r == 1);
        prop_assert!(f.h.diagonal().iter().all(|&d| d == 1.0));
    }

    #[test]
    fn structural_verdicts_do_not_depend_on_the_seed(n in 2usize..=4, r in 1usize..=4, seed: u64) {
        let r = 1 + (r - 1) % n;
        let w = random_invertible(n, split_seed(seed, 0), 1e3).unwrap();
        let h = random_unit_diag_psd(n, r, split_seed(seed, 1)).unwrap();
        let t = op_from_hadamard_congruence(&w, &h).unwrap();
        let a = classify(&t, 20, split_seed(seed, 2), &tol());
        let b = classify(&t, 20, split_seed(seed, 3), &tol());
        prop_assert_eq!(a.tag(), b.tag());
    }
}
