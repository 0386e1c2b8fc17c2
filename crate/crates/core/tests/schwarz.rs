use deflation_core::krylov::{gmres, GmresConfig};
use deflation_core::linalg::{norm2, LinearOperator};
use deflation_core::pde::{add_overlap, assemble, partition, Grid2D, KappaField};
use deflation_core::precond::{PreconditionedOperator, RasPreconditioner, Side};

#[test]
fn single_subdomain_is_exact_inverse() {
    let grid = Grid2D::square(12).unwrap();
    let (a, b) = assemble(&grid, &KappaField::Skyscraper).unwrap();
    let dec = add_overlap(&partition(&grid, 1).unwrap(), 2, &a).unwrap();
    let ras = RasPreconditioner::new(&a, &dec).unwrap();
    let x = ras.apply_vec(&b);
    let r: Vec<f64> = a.matvec(&x).iter().zip(&b).map(|(u, v)| u - v).collect();
    assert!(norm2(&r) <= 1e-10 * norm2(&b));
}

#[test]
fn sixteen_subdomains_beat_unpreconditioned() {
    let grid = Grid2D::square(40).unwrap();
    let (a, b) = assemble(&grid, &KappaField::Continuous).unwrap();
    let dec = add_overlap(&partition(&grid, 16).unwrap(), 2, &a).unwrap();
    let ras = RasPreconditioner::new(&a, &dec).unwrap();
    let cfg = GmresConfig::new(1e-8, 600).unwrap();
    let plain = gmres(&a, &b, None, &cfg).unwrap();
    let op = PreconditionedOperator::ras(&a, Side::Left, &ras).unwrap();
    let pre = gmres(&op, &op.precondition(&b), None, &cfg).unwrap();
    assert!(pre.converged);
    assert!(pre.iterations < plain.iterations, "{} vs {}", pre.iterations, plain.iterations);
}

#[test]
fn application_is_linear() {
    let grid = Grid2D::square(20).unwrap();
    let (a, _) = assemble(&grid, &KappaField::Skyscraper).unwrap();
    let dec = add_overlap(&partition(&grid, 4).unwrap(), 2, &a).unwrap();
    let ras = RasPreconditioner::new(&a, &dec).unwrap();
    let x: Vec<f64> = (0..grid.len()).map(|i| (i as f64 * 0.37).sin()).collect();
    let y: Vec<f64> = (0..grid.len()).map(|i| (i as f64 * 0.11).cos()).collect();
    let combo: Vec<f64> = x.iter().zip(&y).map(|(u, v)| 2.5 * u - v).collect();
    let lhs = ras.apply_vec(&combo);
    let rx = ras.apply_vec(&x);
    let ry = ras.apply_vec(&y);
    let diff: Vec<f64> = lhs.iter().zip(rx.iter().zip(&ry)).map(|(l, (u, v))| l - (2.5 * u - v)).collect();
    assert!(norm2(&diff) <= 1e-12 * norm2(&lhs));
}
