mod common;

use common::{rng, spd_with, split_eigenvalues};
use deflation_core::krylov::{extract_ritz, gmres, GmresConfig};
use deflation_core::linalg::{lu_factor, norm2, sym_eigvals, DenseMatrix, LinearOperator, SparseMatrix};
use proptest::prelude::*;

#[test]
fn distinct_eigenvalue_count_bounds_iterations() {
    let d: Vec<f64> = (0..60).map(|i| [1.0, 2.0, 3.0, 5.0, 8.0][i % 5]).collect();
    let a = SparseMatrix::from_diag(&d);
    let r = gmres(&a, &vec![1.0; 60], None, &GmresConfig::new(1e-12, 100).unwrap()).unwrap();
    assert!(r.converged);
    assert!(r.iterations <= 5, "{}", r.iterations);
}

#[test]
fn matches_dense_solve() {
    let mut g = rng(21);
    let eigs = split_eigenvalues(40, 3, &mut g);
    let (a, _) = spd_with(&eigs, &mut g);
    let b: Vec<f64> = (0..40).map(|i| (i as f64).sin()).collect();
    let r = gmres(&a, &b, None, &GmresConfig::new(1e-13, 40).unwrap()).unwrap();
    let x = lu_factor(&a).unwrap().solve(&b);
    let err: Vec<f64> = r.x.iter().zip(&x).map(|(u, v)| u - v).collect();
    assert!(norm2(&err) <= 1e-8 * norm2(&x));
    assert!(r.true_residual <= 1e-12 * norm2(&b));
}

#[test]
fn ritz_values_converge_to_small_eigenvalues() {
    let mut g = rng(22);
    let eigs = split_eigenvalues(50, 3, &mut g);
    let (a, _) = spd_with(&eigs, &mut g);
    let b = vec![1.0; 50];
    let r = gmres(&a, &b, None, &GmresConfig::new(1e-14, 50).unwrap().with_basis()).unwrap();
    let report = extract_ritz(r.basis.as_ref().unwrap(), &a, 0.5).unwrap();
    let values = report.values();
    assert_eq!(values.len(), 3);
    for (v, e) in values.iter().zip(&eigs[..3]) {
        assert!((v - e).abs() <= 1e-8, "{v} vs {e}");
    }
    for p in &report.pairs {
        let av = a.apply_vec(&p.vector);
        let res: Vec<f64> = av.iter().zip(&p.vector).map(|(x, y)| x - p.value * y).collect();
        assert!((norm2(&res) - p.residual).abs() <= 1e-12 + 1e-8 * p.residual);
    }
}

#[test]
fn ritz_extraction_reaches_full_spectrum() {
    let a = DenseMatrix::from_fn(6, 6, |i, j| match i.abs_diff(j) {
        0 => 2.0,
        1 => -1.0,
        _ => 0.0,
    });
    let r = gmres(&a, &[1.0, 0.3, -0.2, 0.5, 0.1, 0.7], None, &GmresConfig::new(1e-14, 6).unwrap().with_basis()).unwrap();
    let report = extract_ritz(r.basis.as_ref().unwrap(), &a, 10.0).unwrap();
    let mut got = report.values();
    got.sort_by(f64::total_cmp);
    let want = sym_eigvals(&a).unwrap();
    for (g, w) in got.iter().zip(&want) {
        assert!((g - w).abs() < 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn residual_history_is_nonincreasing(seed in 0u64..10_000, n in 5usize..40) {
        let mut g = rng(seed);
        let eigs = split_eigenvalues(n, 1, &mut g);
        let (a, _) = spd_with(&eigs, &mut g);
        let b: Vec<f64> = (0..n).map(|i| ((i * 7 + 3) % 11) as f64 - 5.0).collect();
        let r = gmres(&a, &b, None, &GmresConfig::new(1e-12, n).unwrap()).unwrap();
        prop_assert!((r.history[0] - 1.0).abs() < 1e-12);
        for w in r.history.windows(2) {
            prop_assert!(w[1] <= w[0] * (1.0 + 1e-10));
        }
        prop_assert_eq!(r.history.len(), r.iterations + 1);
    }

    #[test]
    fn arnoldi_basis_is_orthonormal(seed in 0u64..10_000) {
        let mut g = rng(seed);
        let eigs = split_eigenvalues(30, 2, &mut g);
        let (a, _) = spd_with(&eigs, &mut g);
        let r = gmres(&a, &vec![1.0; 30], None, &GmresConfig::new(1e-12, 15).unwrap().with_basis()).unwrap();
        let basis = r.basis.unwrap();
        let steps = basis.steps();
        prop_assert!(basis.v.columns_range(0, steps).orthonormality_defect() < 1e-12);
    }
}
