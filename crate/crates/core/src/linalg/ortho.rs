//! Classical Gram–Schmidt with one unconditional reorthogonalization pass.

use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::dense::{axpy, dot, norm2, DenseMatrix};

/// Columns whose norm after projection falls below this fraction of ‖X‖_F are dropped.
pub const RANK_DROP_TOL: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct Orthonormalized {
    pub q: DenseMatrix,
    /// Indices of the input columns that survived, in order.
    pub kept: Vec<usize>,
    pub dropped: usize,
}

/// Removes the components of `w` along the columns of `basis` (two passes).
pub(crate) fn project_out(basis: &[Vec<f64>], w: &mut [f64]) {
    for _ in 0..2 {
        let coeffs: Vec<f64> = basis.iter().map(|q| dot(q, w)).collect();
        for (q, c) in basis.iter().zip(coeffs) {
            axpy(-c, q, w);
        }
    }
}

pub fn orthonormalize(x: &DenseMatrix) -> Result<Orthonormalized> {
    let tol = RANK_DROP_TOL * x.frobenius_norm();
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(x.cols());
    let mut kept = Vec::with_capacity(x.cols());
    for (j, col) in x.columns().enumerate() {
        let mut w = col.to_vec();
        project_out(&basis, &mut w);
        let nrm = norm2(&w);
        if nrm <= tol || nrm == 0.0 {
            continue;
        }
        w.iter_mut().for_each(|v| *v /= nrm);
        basis.push(w);
        kept.push(j);
    }
    if basis.is_empty() {
        return Err(Error::EmptyBasis { dropped: x.cols() });
    }
    let dropped = x.cols() - basis.len();
    Ok(Orthonormalized {
        q: DenseMatrix::from_columns(x.rows(), &basis)?,
        kept,
        dropped,
    })
}

/// An orthonormal basis of the orthogonal complement of span(`q`), built by
/// orthogonalizing random vectors against `q`. `q` must be orthonormal.
pub fn complete_basis<R: Rng + ?Sized>(q: &DenseMatrix, rng: &mut R) -> Result<DenseMatrix> {
    let n = q.rows();
    let r = q.cols();
    if r > n {
        return Err(Error::Dimension(format!("{r} columns in dimension {n}")));
    }
    let mut basis: Vec<Vec<f64>> = q.columns().map(|c| c.to_vec()).collect();
    let mut attempts = 0;
    while basis.len() < n {
        attempts += 1;
        if attempts > 4 * n + 16 {
            return Err(Error::Invalid("could not complete the basis".into()));
        }
        let mut w: Vec<f64> = (0..n).map(|_| 2.0 * rng.gen::<f64>() - 1.0).collect();
        let before = norm2(&w);
        project_out(&basis, &mut w);
        let nrm = norm2(&w);
        if nrm <= RANK_DROP_TOL * before {
            continue;
        }
        w.iter_mut().for_each(|v| *v /= nrm);
        basis.push(w);
    }
    DenseMatrix::from_columns(n, &basis[r..])
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn identity_unchanged() {
        let x = DenseMatrix::identity_columns(5, 3);
        let o = orthonormalize(&x).unwrap();
        assert_eq!(o.q, x);
        assert_eq!(o.dropped, 0);
    }

    #[test]
    fn rank_deficient_pair() {
        let v = [3.0, 4.0, 0.0];
        let x = DenseMatrix::from_columns(3, &[v.to_vec(), v.iter().map(|a| 2.0 * a).collect()]).unwrap();
        let o = orthonormalize(&x).unwrap();
        assert_eq!(o.q.cols(), 1);
        assert_eq!(o.dropped, 1);
        assert_eq!(o.kept, vec![0]);
        for (a, b) in o.q.col(0).iter().zip([0.6, 0.8, 0.0]) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn all_zero_is_error() {
        assert!(matches!(
            orthonormalize(&DenseMatrix::zeros(4, 2)),
            Err(Error::EmptyBasis { dropped: 2 })
        ));
    }

    #[test]
    fn completion_is_orthonormal_frame() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let x = DenseMatrix::random_uniform(9, 3, &mut rng);
        let q = orthonormalize(&x).unwrap().q;
        let qp = complete_basis(&q, &mut rng).unwrap();
        let frame = q.hcat(&qp).unwrap();
        assert_eq!(frame.cols(), 9);
        assert!(frame.orthonormality_defect() < 1e-13);
    }
}
