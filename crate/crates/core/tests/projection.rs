mod common;

use common::{max_abs_diff, rng, spd_with, split_eigenvalues};
use deflation_core::analysis::{
    bound_inexact_a, bound_inexact_c, bound_inexact_d, bound_pa, bound_pc, bound_pd, eps_c, eps_d, eta_d, spectrum_of,
    xi_a, xi_c, xi_d, SpectralSplit,
};
use deflation_core::coarse::{perturb_space, subspace_angle, SubspaceAngle};
use deflation_core::linalg::{norm2, spectral_norm, DenseMatrix, LinearOperator};
use deflation_core::precond::{PrecondKind, PreconditionedOperator, ProjectionOperator, Side, SolverKind};
use rand::Rng;

fn sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v
}

fn spectrum(a: &DenseMatrix, p: &ProjectionOperator, kind: PrecondKind) -> Vec<f64> {
    let op = PreconditionedOperator::projected(a, kind, Side::Left, p).unwrap();
    let s = spectrum_of(&op).unwrap();
    assert!(s.max_imag <= 1e-10, "{}", s.max_imag);
    s.re
}

#[test]
fn exact_space_spectra() {
    let mut g = rng(11);
    for _ in 0..10 {
        let n = g.gen_range(10..=40);
        let r = g.gen_range(1..=6);
        let eigs = split_eigenvalues(n, r, &mut g);
        let (a, q) = spd_with(&eigs, &mut g);
        let p = ProjectionOperator::new(&a, q.columns_range(0, r), SolverKind::ExactLu).unwrap();
        let tol = 1e-9 * eigs[n - 1];
        let perp = &eigs[r..];

        let zeros = std::iter::repeat(0.0).take(r).chain(perp.iter().copied()).collect();
        assert!(max_abs_diff(&spectrum(&a, &p, PrecondKind::Pd), &sorted(zeros)) <= tol);

        let ones = std::iter::repeat(1.0).take(r).chain(perp.iter().copied()).collect();
        assert!(max_abs_diff(&spectrum(&a, &p, PrecondKind::Pa), &sorted(ones)) <= tol);

        let shifted = eigs[..r].iter().map(|l| 1.0 + l).chain(perp.iter().copied()).collect();
        assert!(max_abs_diff(&spectrum(&a, &p, PrecondKind::Pc), &sorted(shifted)) <= tol);
    }
}

#[test]
fn exact_space_preconditioners_commute_with_a() {
    let mut g = rng(12);
    let eigs = split_eigenvalues(30, 4, &mut g);
    let (a, q) = spd_with(&eigs, &mut g);
    let p = ProjectionOperator::new(&a, q.columns_range(0, 4), SolverKind::ExactLu).unwrap();
    for kind in [PrecondKind::Pd, PrecondKind::Pc, PrecondKind::Pa] {
        let left = PreconditionedOperator::projected(&a, kind, Side::Left, &p).unwrap();
        let right = PreconditionedOperator::projected(&a, kind, Side::Right, &p).unwrap();
        for _ in 0..20 {
            let x: Vec<f64> = (0..30).map(|_| g.gen_range(-1.0..1.0)).collect();
            let pa = left.apply_vec(&x);
            let ap = right.apply_vec(&x);
            let diff: Vec<f64> = pa.iter().zip(&ap).map(|(u, v)| u - v).collect();
            assert!(norm2(&diff) <= 1e-9 * eigs[29] * norm2(&x));
        }
    }
}

#[test]
fn adapted_deflation_pairs_with_deflation() {
    let mut g = rng(13);
    for _ in 0..5 {
        let eigs = split_eigenvalues(30, 3, &mut g);
        let (a, q) = spd_with(&eigs, &mut g);
        let v = q.columns_range(0, 3);
        let z = perturb_space(&v, 50.0, &mut g).unwrap().z;
        let p = ProjectionOperator::new(&a, z.clone(), SolverKind::ExactLu).unwrap();
        let op_d = PreconditionedOperator::projected(&a, PrecondKind::Pd, Side::Left, &p).unwrap();
        let op_a = PreconditionedOperator::projected(&a, PrecondKind::Pa, Side::Left, &p).unwrap();
        let sd = spectrum_of(&op_d).unwrap();
        let sa = spectrum_of(&op_a).unwrap();
        let split = SpectralSplit::from_eigenvalues(&eigs, 3).unwrap();
        let angle = subspace_angle(&z, &v).unwrap();
        let report = bound_pa(&split, p.e(), &angle, &sa, Some(&sd)).unwrap();
        assert!(report.pairing_deviation.unwrap() <= 1e-8, "{report:?}");
        assert!(!report.is_violation());
    }
}

fn angle(sin: f64) -> SubspaceAngle {
    SubspaceAngle {
        sin,
        cos: (1.0 - sin * sin).sqrt(),
        dist: sin,
        cross_check: None,
    }
}

#[test]
fn zero_angle_collapses_bounds() {
    let eigs = [0.01, 0.02, 1.0, 2.0, 5.0];
    let split = SpectralSplit::from_eigenvalues(&eigs, 2).unwrap();
    let e = DenseMatrix::from_diag(&[0.01, 0.02]);
    let zero = angle(0.0);
    assert_eq!(eta_d(&split, &zero), 0.0);
    assert_eq!(eps_d(&split, 0.02, 100.0, &zero), 0.0);
    assert_eq!(eps_c(&split, 100.0, &zero), 0.0);

    let pd = spectrum_of(&DenseMatrix::from_diag(&[0.0, 0.0, 1.0, 2.0, 5.0])).unwrap();
    let r = bound_pd(&split, &e, &zero, &pd).unwrap();
    assert_eq!((r.lower, r.upper), (1.0, 5.0));
    assert!(r.contained && !r.is_violation());

    let pc = spectrum_of(&DenseMatrix::from_diag(&[1.01, 1.02, 1.0, 2.0, 5.0])).unwrap();
    let r = bound_pc(&split, &e, &zero, &pc).unwrap();
    assert_eq!((r.lower, r.upper), (1.0, 5.0));
    assert_eq!(r.all_positive, Some(true));
}

#[test]
fn zero_rho_collapses_inexact_bounds() {
    let split = SpectralSplit::from_eigenvalues(&[0.01, 0.02, 1.0, 2.0, 5.0], 2).unwrap();
    assert_eq!((xi_d(&split, 0.0), xi_c(0.0), xi_a(&split, 0.0, 0.0)), (0.0, 0.0, 0.0));
    let pd = spectrum_of(&DenseMatrix::from_diag(&[0.0, 0.0, 1.0, 2.0, 5.0])).unwrap();
    let r = bound_inexact_d(&split, 0.0, &pd).unwrap();
    assert_eq!((r.lower, r.upper), (0.0, 5.0));
    assert!(r.contained);
    let pa = spectrum_of(&DenseMatrix::from_diag(&[1.0, 1.0, 1.0, 2.0, 5.0])).unwrap();
    let r = bound_inexact_a(&split, 0.0, 0.0, &pa).unwrap();
    assert_eq!((r.lower, r.upper), (1.0, 5.0));
    let pc = spectrum_of(&DenseMatrix::from_diag(&[1.01, 1.02, 1.0, 2.0, 5.0])).unwrap();
    assert!(bound_inexact_c(&split, 0.0, &pc).unwrap().contained);
}

#[test]
fn bound_widths_are_monotone() {
    let split = SpectralSplit::from_eigenvalues(&[1e-3, 0.05, 1.0, 3.0, 10.0], 2).unwrap();
    let mut prev = (0.0, 0.0, 0.0);
    for k in 0..200 {
        let t = k as f64 / 200.0 * std::f64::consts::FRAC_PI_2;
        let a = angle(t.sin());
        let cur = (eta_d(&split, &a), eps_d(&split, 0.05, 1e3, &a), eps_c(&split, 1e3, &a));
        assert!(cur.0 >= prev.0 && cur.1 >= prev.1 && cur.2 >= prev.2, "at θ = {t}");
        prev = cur;
    }
    let mut prev = (0.0, 0.0, 0.0);
    for k in 0..100 {
        let rho = 1e-10 * 1.3f64.powi(k);
        let cur = (xi_d(&split, rho), xi_c(rho), xi_a(&split, rho, rho));
        assert!(cur.0 >= prev.0 && cur.1 >= prev.1 && cur.2 >= prev.2);
        prev = cur;
    }
}

#[test]
fn orthogonal_space_is_rejected() {
    let mut g = rng(14);
    let eigs = split_eigenvalues(12, 2, &mut g);
    let (a, q) = spd_with(&eigs, &mut g);
    let z = q.columns_range(2, 4);
    let angle = subspace_angle(&z, &q.columns_range(0, 2)).unwrap();
    assert!(angle.cos < 1e-12);
    let p = ProjectionOperator::new(&a, z, SolverKind::ExactLu).unwrap();
    let s = spectrum_of(&PreconditionedOperator::projected(&a, PrecondKind::Pd, Side::Left, &p).unwrap()).unwrap();
    let split = SpectralSplit::from_eigenvalues(&eigs, 2).unwrap();
    assert!(matches!(
        bound_pd(&split, p.e(), &angle, &s),
        Err(deflation_core::Error::Hypothesis(_))
    ));
}

#[test]
fn perturbed_e_leaves_small_eigenvalues_near_zero() {
    let mut g = rng(15);
    let eigs = split_eigenvalues(25, 3, &mut g);
    let (a, q) = spd_with(&eigs, &mut g);
    let v = q.columns_range(0, 3);
    let exact = ProjectionOperator::new(&a, v.clone(), SolverKind::ExactLu).unwrap();
    let h = exact.e().add(&DenseMatrix::identity(3).scale(1e-6)).unwrap();
    let p = ProjectionOperator::new(&a, v, SolverKind::Perturbed(h)).unwrap();
    let (rho, _) = p.rho_norms();
    let split = SpectralSplit::from_eigenvalues(&eigs, 3).unwrap();
    let s = spectrum_of(&PreconditionedOperator::projected(&a, PrecondKind::Pd, Side::Left, &p).unwrap()).unwrap();
    let xi = xi_d(&split, rho);
    assert!(xi > 0.0);
    assert_eq!(s.re.iter().filter(|l| l.abs() <= xi * (1.0 + 1e-6)).count(), 3);
}

#[test]
fn large_rank_rho_matches_dense_products() {
    let mut g = rng(16);
    let n = 600;
    let r = 300;
    let diag: Vec<f64> = (0..n).map(|i| 1.0 + i as f64).collect();
    let a = DenseMatrix::from_diag(&diag);
    let z = DenseMatrix::identity_columns(n, r);
    let exact = ProjectionOperator::new(&a, z.clone(), SolverKind::ExactLu).unwrap();
    let noise = DenseMatrix::from_fn(r, r, |_, _| g.gen_range(-1.0..1.0));
    let h = exact.e().add(&noise.scale(1e-2)).unwrap();
    let p = ProjectionOperator::new(&a, z, SolverKind::Perturbed(h.clone())).unwrap();
    let (right, left) = p.rho_norms();

    let hinv = deflation_core::linalg::lu_factor(&h).unwrap().inverse();
    let mut dr = p.e().matmul(&hinv).unwrap();
    let mut dl = hinv.matmul(p.e()).unwrap();
    for i in 0..r {
        dr[(i, i)] -= 1.0;
        dl[(i, i)] -= 1.0;
    }
    let (er, el) = (spectral_norm(&dr), spectral_norm(&dl));
    assert!((right - er).abs() <= 1e-8 * er, "{right} {er}");
    assert!((left - el).abs() <= 1e-8 * el, "{left} {el}");
}
