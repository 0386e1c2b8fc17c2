#![allow(dead_code)]

use deflation_core::linalg::{orthonormalize, DenseMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_orthogonal(n: usize, rng: &mut ChaCha8Rng) -> DenseMatrix {
    let x = DenseMatrix::random_uniform(n, n, rng).add(&DenseMatrix::identity(n)).unwrap();
    let q = orthonormalize(&x).unwrap();
    assert_eq!(q.dropped, 0);
    q.q
}

/// `Q·diag(eigs)·Qᵀ`, exactly symmetric, with its eigenbasis.
pub fn spd_with(eigs: &[f64], rng: &mut ChaCha8Rng) -> (DenseMatrix, DenseMatrix) {
    let n = eigs.len();
    let q = random_orthogonal(n, rng);
    let qd = DenseMatrix::from_fn(n, n, |i, j| q[(i, j)] * eigs[j]);
    let full = qd.matmul(&q.transpose()).unwrap();
    let a = DenseMatrix::from_fn(n, n, |i, j| 0.5 * (full[(i, j)] + full[(j, i)]));
    (a, q)
}

/// `r` small eigenvalues in [1e-3, 1e-1], the rest in [1, 10], ascending.
pub fn split_eigenvalues(n: usize, r: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let mut small: Vec<f64> = (0..r).map(|_| 10f64.powf(rng.gen_range(-3.0..-1.0))).collect();
    let mut large: Vec<f64> = (0..n - r).map(|_| rng.gen_range(1.0..10.0)).collect();
    small.sort_by(f64::total_cmp);
    large.sort_by(f64::total_cmp);
    small.into_iter().chain(large).collect()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
