use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::krylov::gmres::ArnoldiBasis;
use crate::linalg::{axpy, dot, general_eig_real, lu_factor, norm2, sym_eig, DenseMatrix, LinearOperator};

/// Ritz values whose imaginary part exceeds this fraction of the real part
/// are treated as complex and skipped.
const COMPLEX_REL_TOL: f64 = 1e-8;
const CLUSTER_REL_TOL: f64 = 1e-8;
const INVERSE_ITERATIONS: usize = 4;
const RITZ_SEED: u64 = 0x5172_5eed;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RitzPair {
    pub value: f64,
    /// Unit 2-norm.
    pub vector: Vec<f64>,
    /// `‖B v − λ v‖₂`, recomputed against the operator.
    pub residual: f64,
}

#[derive(Debug, Clone, Default)]
pub struct RitzReport {
    /// Ascending by value.
    pub pairs: Vec<RitzPair>,
    /// Complex Ritz values left out (each member of a conjugate pair counts).
    pub complex_excluded: usize,
}

impl RitzReport {
    pub fn values(&self) -> Vec<f64> {
        self.pairs.iter().map(|p| p.value).collect()
    }

    /// Ritz vectors as the columns of an `n × k` matrix.
    pub fn vectors(&self) -> Result<DenseMatrix> {
        let n = self.pairs.first().map_or(0, |p| p.vector.len());
        let cols: Vec<Vec<f64>> = self.pairs.iter().map(|p| p.vector.clone()).collect();
        DenseMatrix::from_columns(n, &cols)
    }
}

/// Eigenvector of `h` for the real eigenvalue `lambda` by shifted inverse
/// iteration, kept orthogonal to `previous` (earlier members of a cluster).
fn inverse_iteration(h: &DenseMatrix, lambda: f64, scale: f64, previous: &[Vec<f64>], rng: &mut ChaCha8Rng) -> Vec<f64> {
    let m = h.rows();
    let mut delta = 1e-10 * scale.max(f64::MIN_POSITIVE);
    let lu = loop {
        let mut shifted = h.clone();
        for i in 0..m {
            shifted[(i, i)] -= lambda + delta;
        }
        match lu_factor(&shifted) {
            Ok(f) => break Some(f),
            Err(_) if delta < 1e-4 * scale => delta *= 100.0,
            Err(_) => break None,
        }
    };
    let mut y: Vec<f64> = (0..m).map(|_| rng.gen::<f64>() - 0.5).collect();
    let orth = |y: &mut Vec<f64>| {
        for _ in 0..2 {
            for p in previous {
                let c = dot(p, y);
                axpy(-c, p, y);
            }
        }
        let nrm = norm2(y);
        if nrm > 0.0 {
            y.iter_mut().for_each(|v| *v /= nrm);
        }
    };
    orth(&mut y);
    if let Some(lu) = lu {
        for _ in 0..INVERSE_ITERATIONS {
            let next = lu.solve(&y);
            if next.iter().all(|v| v.is_finite()) {
                y = next;
            }
            orth(&mut y);
        }
    }
    y
}

/// Real eigenpairs of a small general matrix with eigenvalue below
/// `threshold`, plus the number of complex eigenvalues skipped.
fn small_eigpairs(h: &DenseMatrix, threshold: f64, seed: u64) -> Result<(Vec<(f64, Vec<f64>)>, usize)> {
    if h.is_symmetric(1e-10) {
        let sym = DenseMatrix::from_fn(h.rows(), h.cols(), |i, j| 0.5 * (h[(i, j)] + h[(j, i)]));
        let dec = sym_eig(&sym)?;
        let pairs = dec
            .eigenvalues
            .iter()
            .enumerate()
            .filter(|(_, &l)| l < threshold)
            .map(|(k, &l)| (l, dec.eigenvectors.col(k).to_vec()))
            .collect();
        return Ok((pairs, 0));
    }
    let spec = general_eig_real(h, f64::INFINITY)?;
    let scale = spec
        .re
        .iter()
        .zip(&spec.im)
        .fold(0.0f64, |m, (r, i)| m.max(r.hypot(*i)));
    let mut excluded = 0;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out: Vec<(f64, Vec<f64>)> = Vec::new();
    let mut cluster: Vec<Vec<f64>> = Vec::new();
    let mut cluster_value = f64::NAN;
    for (&re, &im) in spec.re.iter().zip(&spec.im) {
        if im.abs() > COMPLEX_REL_TOL * re.abs() {
            excluded += 1;
            continue;
        }
        if re >= threshold {
            continue;
        }
        if !((re - cluster_value).abs() <= CLUSTER_REL_TOL * scale) {
            cluster.clear();
            cluster_value = re;
        }
        let y = inverse_iteration(h, re, scale, &cluster, &mut rng);
        cluster.push(y.clone());
        out.push((re, y));
    }
    Ok((out, excluded))
}

fn lift(op: &dyn LinearOperator, basis: &DenseMatrix, pairs: Vec<(f64, Vec<f64>)>) -> Vec<RitzPair> {
    pairs
        .into_iter()
        .map(|(value, y)| {
            let mut v = basis.matvec(&y);
            let nrm = norm2(&v);
            if nrm > 0.0 {
                v.iter_mut().for_each(|t| *t /= nrm);
            }
            let mut r = op.apply_vec(&v);
            axpy(-value, &v, &mut r);
            RitzPair {
                value,
                residual: norm2(&r),
                vector: v,
            }
        })
        .collect()
}

/// Ritz pairs of `op` from a GMRES Arnoldi basis with value below `threshold`.
pub fn extract_ritz(basis: &ArnoldiBasis, op: &dyn LinearOperator, threshold: f64) -> Result<RitzReport> {
    let m = basis.steps();
    if basis.v.rows() != op.dim() {
        return Err(Error::Dimension(format!(
            "basis of length {} for operator of order {}",
            basis.v.rows(),
            op.dim()
        )));
    }
    if m == 0 {
        return Ok(RitzReport::default());
    }
    let hm = DenseMatrix::from_fn(m, m, |i, j| basis.h[(i, j)]);
    let (pairs, complex_excluded) = small_eigpairs(&hm, threshold, RITZ_SEED)?;
    Ok(RitzReport {
        pairs: lift(op, &basis.v.columns_range(0, m), pairs),
        complex_excluded,
    })
}

/// All Rayleigh–Ritz pairs of `op` on span(`z`), with `z` orthonormal.
pub fn rayleigh_ritz(op: &dyn LinearOperator, z: &DenseMatrix) -> Result<RitzReport> {
    if z.rows() != op.dim() {
        return Err(Error::Dimension(format!(
            "basis of length {} for operator of order {}",
            z.rows(),
            op.dim()
        )));
    }
    let projected = z.tr_matmul(&op.apply_columns(z))?;
    let (pairs, complex_excluded) = small_eigpairs(&projected, f64::INFINITY, RITZ_SEED)?;
    Ok(RitzReport {
        pairs: lift(op, z, pairs),
        complex_excluded,
    })
}
