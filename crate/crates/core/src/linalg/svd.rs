//! Singular values by one-sided Jacobi rotations.

use crate::linalg::dense::{axpy, dot, norm2, DenseMatrix};
use crate::linalg::eig::sym_eigvals;

const MAX_SWEEPS: usize = 80;

/// Singular values, descending. Works on whichever of `X`, `Xᵀ` has fewer columns.
pub fn singular_values(x: &DenseMatrix) -> Vec<f64> {
    let work = if x.cols() > x.rows() { x.transpose() } else { x.clone() };
    let n = work.cols();
    let m = work.rows();
    if n == 0 || m == 0 {
        return vec![0.0; x.rows().min(x.cols())];
    }
    let mut cols: Vec<Vec<f64>> = work.columns().map(|c| c.to_vec()).collect();
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let alpha = dot(&cols[p], &cols[p]);
                let beta = dot(&cols[q], &cols[q]);
                let gamma = dot(&cols[p], &cols[q]);
                if gamma == 0.0 || gamma.abs() <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let t = if zeta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                let (left, right) = cols.split_at_mut(q);
                let (cp, cq) = (&mut left[p], &mut right[0]);
                for (a, b) in cp.iter_mut().zip(cq.iter_mut()) {
                    let (ap, bq) = (*a, *b);
                    *a = c * ap - s * bq;
                    *b = s * ap + c * bq;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sv: Vec<f64> = cols.iter().map(|c| dot(c, c).sqrt()).collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

/// ‖X‖₂, as the square root of the largest eigenvalue of the smaller Gram matrix.
pub fn spectral_norm(x: &DenseMatrix) -> f64 {
    if x.rows() == 0 || x.cols() == 0 {
        return 0.0;
    }
    let gram = if x.cols() <= x.rows() {
        x.tr_matmul(x)
    } else {
        x.transpose().tr_matmul(&x.transpose())
    };
    match gram.and_then(|g| sym_eigvals(&g)) {
        Ok(ev) => ev.iter().copied().fold(0.0f64, f64::max).sqrt(),
        Err(_) => singular_values(x).first().copied().unwrap_or(0.0),
    }
}

/// ‖M‖₂ for a square operator given only `x ↦ Mx` and `x ↦ Mᵀx`: Lanczos on
/// `MᵀM` with full reorthogonalization, stopped once the top Ritz value settles.
pub fn operator_norm(
    n: usize,
    apply: impl Fn(&[f64]) -> Vec<f64>,
    apply_t: impl Fn(&[f64]) -> Vec<f64>,
    max_steps: usize,
) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let steps = max_steps.clamp(1, n);
    let mut q: Vec<f64> = (0..n).map(|i| 1.0 + 0.5 * ((i + 1) as f64).sin()).collect();
    let s = norm2(&q);
    q.iter_mut().for_each(|v| *v /= s);
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(steps);
    let (mut alpha, mut beta) = (Vec::with_capacity(steps), Vec::with_capacity(steps));
    let mut last = f64::NAN;
    loop {
        let mut w = apply_t(&apply(&q));
        let a = dot(&q, &w);
        basis.push(q);
        alpha.push(a);
        for _ in 0..2 {
            for b in &basis {
                let c = dot(b, &w);
                axpy(-c, b, &mut w);
            }
        }
        let bnext = norm2(&w);
        let k = basis.len();
        let done = k == steps || bnext <= 1e-14 * alpha.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if done || k % 5 == 0 {
            let t = DenseMatrix::from_fn(k, k, |i, j| {
                if i == j {
                    alpha[i]
                } else if i + 1 == j || j + 1 == i {
                    beta[i.min(j)]
                } else {
                    0.0
                }
            });
            let top = sym_eigvals(&t).map_or(0.0, |ev| ev.iter().copied().fold(0.0f64, f64::max));
            if done || (top - last).abs() <= 1e-13 * top {
                return top.max(0.0).sqrt();
            }
            last = top;
        }
        beta.push(bnext);
        q = w.iter().map(|v| v / bnext).collect();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal() {
        let s = singular_values(&DenseMatrix::from_diag(&[1.0, 3.0]));
        assert_eq!(s, vec![3.0, 1.0]);
    }

    #[test]
    fn norm_agrees_with_jacobi() {
        let x = DenseMatrix::from_fn(7, 4, |i, j| ((i * 3 + j * 5) % 7) as f64 - 2.5);
        let a = spectral_norm(&x);
        let b = singular_values(&x)[0];
        assert!((a - b).abs() <= 1e-12 * b, "{a} {b}");
        assert!((spectral_norm(&x.transpose()) - b).abs() <= 1e-12 * b);
        assert_eq!(spectral_norm(&DenseMatrix::zeros(3, 3)), 0.0);
    }

    #[test]
    fn operator_norm_matches_dense() {
        let x = DenseMatrix::from_fn(40, 40, |i, j| (((i * 7 + j * 13) % 11) as f64 - 5.0) / (1.0 + (i + j) as f64));
        let dense = spectral_norm(&x);
        let est = operator_norm(40, |v| x.matvec(v), |v| x.transpose().matvec(v), 40);
        assert!((est - dense).abs() <= 1e-10 * dense, "{est} {dense}");
        assert_eq!(operator_norm(5, |v| vec![0.0; v.len()], |v| vec![0.0; v.len()], 5), 0.0);
    }

    #[test]
    fn zero_matrix() {
        assert_eq!(singular_values(&DenseMatrix::zeros(3, 2)), vec![0.0, 0.0]);
        assert_eq!(singular_values(&DenseMatrix::zeros(2, 3)), vec![0.0, 0.0]);
    }

    #[test]
    fn rank_one() {
        // [1 1; 1 1] has singular values 2, 0
        let s = singular_values(&DenseMatrix::from_row_major(2, 2, &[1.0, 1.0, 1.0, 1.0]).unwrap());
        assert!((s[0] - 2.0).abs() < 1e-15);
        assert!(s[1].abs() < 1e-15);
    }
}
