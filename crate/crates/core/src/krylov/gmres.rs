use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{axpy, dot, norm2, DenseMatrix, LinearOperator};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GmresConfig {
    /// Relative residual tolerance.
    pub tol: f64,
    pub max_iters: usize,
    /// Return the Arnoldi basis with the result.
    #[serde(default)]
    pub keep_basis: bool,
    /// Norm the residual is divided by; `‖b‖` of the system being solved
    /// when unset.
    #[serde(default)]
    pub reference_norm: Option<f64>,
}

impl Default for GmresConfig {
    fn default() -> Self {
        Self {
            tol: 1e-12,
            max_iters: 300,
            keep_basis: false,
            reference_norm: None,
        }
    }
}

impl GmresConfig {
    pub fn new(tol: f64, max_iters: usize) -> Result<Self> {
        let cfg = Self {
            tol,
            max_iters,
            keep_basis: false,
            reference_norm: None,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_basis(mut self) -> Self {
        self.keep_basis = true;
        self
    }

    /// Measures residuals relative to `norm` instead of `‖b‖`, e.g. the
    /// right-hand side before a left preconditioner was applied.
    pub fn relative_to(mut self, norm: f64) -> Self {
        self.reference_norm = Some(norm);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(r) = self.reference_norm {
            if !(r > 0.0) || !r.is_finite() {
                return Err(Error::Invalid(format!("reference norm must be positive, got {r}")));
            }
        }
        if !(self.tol > 0.0) || !self.tol.is_finite() {
            return Err(Error::Invalid(format!("tolerance must be positive, got {}", self.tol)));
        }
        if self.max_iters == 0 {
            return Err(Error::Invalid("max_iters must be at least 1".into()));
        }
        Ok(())
    }
}

/// `B·V[:, ..m] = V·H` with `V` orthonormal.
#[derive(Debug, Clone)]
pub struct ArnoldiBasis {
    /// `n × (m+1)`, or `n × m` after a breakdown.
    pub v: DenseMatrix,
    /// `(m+1) × m` upper Hessenberg.
    pub h: DenseMatrix,
}

impl ArnoldiBasis {
    /// Number of Arnoldi steps taken.
    pub fn steps(&self) -> usize {
        self.h.cols()
    }
}

#[derive(Debug, Clone)]
pub struct GmresResult {
    pub x: Vec<f64>,
    /// Residual norms relative to `‖b‖` (or the configured reference norm);
    /// entry 0 is the initial residual, so the length is `iterations + 1`.
    pub history: Vec<f64>,
    pub converged: bool,
    pub iterations: usize,
    /// `‖b − B x‖` recomputed from the returned solution, relative like `history`.
    pub true_residual: f64,
    pub basis: Option<ArnoldiBasis>,
}

impl GmresResult {
    pub fn final_residual(&self) -> f64 {
        *self.history.last().expect("history is never empty")
    }
}

fn givens(a: f64, b: f64) -> (f64, f64) {
    if b == 0.0 {
        (1.0, 0.0)
    } else {
        let r = a.hypot(b);
        (a / r, b / r)
    }
}

/// Full (unrestarted) GMRES with two-pass classical Gram–Schmidt.
pub fn gmres(op: &dyn LinearOperator, b: &[f64], x0: Option<&[f64]>, cfg: &GmresConfig) -> Result<GmresResult> {
    cfg.validate()?;
    let n = op.dim();
    if b.len() != n {
        return Err(Error::Dimension(format!("rhs of length {} for operator of order {n}", b.len())));
    }
    if norm2(b) == 0.0 {
        return Err(Error::Invalid("right-hand side is zero".into()));
    }
    let bnorm = cfg.reference_norm.unwrap_or_else(|| norm2(b));
    let mut x = match x0 {
        Some(x0) if x0.len() != n => {
            return Err(Error::Dimension(format!("initial guess of length {} for order {n}", x0.len())))
        }
        Some(x0) => x0.to_vec(),
        None => vec![0.0; n],
    };

    let mut r = b.to_vec();
    if x.iter().any(|&v| v != 0.0) {
        let ax = op.apply_vec(&x);
        axpy(-1.0, &ax, &mut r);
    }
    let beta = norm2(&r);
    let mut history = vec![beta / bnorm];
    if beta / bnorm <= cfg.tol {
        return Ok(GmresResult {
            true_residual: beta / bnorm,
            x,
            history,
            converged: true,
            iterations: 0,
            basis: cfg.keep_basis.then(|| ArnoldiBasis {
                v: DenseMatrix::zeros(n, 0),
                h: DenseMatrix::zeros(0, 0),
            }),
        });
    }

    let m_max = cfg.max_iters.min(n.max(1));
    let mut v: Vec<Vec<f64>> = Vec::with_capacity(m_max + 1);
    v.push(r.iter().map(|&ri| ri / beta).collect());
    // columns of the unrotated and rotated Hessenberg matrix
    let mut h_cols: Vec<Vec<f64>> = Vec::with_capacity(m_max);
    let mut r_cols: Vec<Vec<f64>> = Vec::with_capacity(m_max);
    let mut rot: Vec<(f64, f64)> = Vec::with_capacity(m_max);
    let mut g = vec![0.0; m_max + 1];
    g[0] = beta;
    let mut converged = false;
    let mut breakdown = false;
    let mut w = vec![0.0; n];

    for j in 0..m_max {
        op.apply(&v[j], &mut w);
        let wnorm0 = norm2(&w);
        let mut h = vec![0.0; j + 2];
        for _ in 0..2 {
            let coeffs: Vec<f64> = v.iter().map(|q| dot(q, &w)).collect();
            for (i, (q, c)) in v.iter().zip(coeffs).enumerate() {
                axpy(-c, q, &mut w);
                h[i] += c;
            }
        }
        let hnext = norm2(&w);
        h[j + 1] = hnext;
        h_cols.push(h.clone());

        let mut rc = h;
        for (i, &(c, s)) in rot.iter().enumerate() {
            let (a, bb) = (rc[i], rc[i + 1]);
            rc[i] = c * a + s * bb;
            rc[i + 1] = -s * a + c * bb;
        }
        let (c, s) = givens(rc[j], rc[j + 1]);
        rc[j] = c * rc[j] + s * rc[j + 1];
        rc[j + 1] = 0.0;
        rot.push((c, s));
        g[j + 1] = -s * g[j];
        g[j] *= c;
        r_cols.push(rc);

        let res = g[j + 1].abs() / bnorm;
        history.push(res);
        if res <= cfg.tol {
            converged = true;
            break;
        }
        if hnext <= f64::EPSILON * wnorm0 {
            breakdown = true;
            converged = true;
            break;
        }
        if j + 1 < m_max {
            v.push(w.iter().map(|&wi| wi / hnext).collect());
        }
    }

    let m = r_cols.len();
    let mut y = vec![0.0; m];
    for i in (0..m).rev() {
        let mut acc = g[i];
        for k in i + 1..m {
            acc -= r_cols[k][i] * y[k];
        }
        y[i] = if r_cols[i][i] != 0.0 { acc / r_cols[i][i] } else { 0.0 };
    }
    for (k, &yk) in y.iter().enumerate() {
        axpy(yk, &v[k], &mut x);
    }

    let mut tr = b.to_vec();
    axpy(-1.0, &op.apply_vec(&x), &mut tr);
    let true_residual = norm2(&tr) / bnorm;

    let basis = if cfg.keep_basis {
        // `w` still holds the unnormalized next Arnoldi vector
        let hnext = h_cols.last().map_or(0.0, |h| h[m]);
        if !breakdown && hnext > 0.0 && v.len() < n {
            v.push(w.iter().map(|&t| t / hnext).collect());
        }
        let mut hm = DenseMatrix::zeros(m + 1, m);
        for (k, col) in h_cols.iter().enumerate() {
            for (i, &val) in col.iter().enumerate() {
                hm[(i, k)] = val;
            }
        }
        Some(ArnoldiBasis {
            v: DenseMatrix::from_columns(n, &v)?,
            h: hm,
        })
    } else {
        None
    };

    Ok(GmresResult {
        x,
        history,
        converged,
        iterations: m,
        true_residual,
        basis,
    })
}

/// `iteration,relative_residual` lines.
pub fn history_csv_string(history: &[f64]) -> String {
    let mut out = String::from("iteration,relative_residual\n");
    for (k, r) in history.iter().enumerate() {
        let _ = writeln!(out, "{k},{r:e}");
    }
    out
}

pub fn write_history_csv(history: &[f64], path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, history_csv_string(history))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{Identity, SparseMatrix};

    #[test]
    fn identity_converges_in_one_step() {
        let b = vec![1.0, -2.0, 3.0];
        let res = gmres(&Identity(3), &b, None, &GmresConfig::default()).unwrap();
        assert!(res.converged);
        assert_eq!(res.iterations, 1);
        for (xi, bi) in res.x.iter().zip(&b) {
            assert!((xi - bi).abs() < 1e-14);
        }
        assert_eq!(res.history.len(), 2);
    }

    #[test]
    fn cap_reached_keeps_history() {
        let a = SparseMatrix::from_diag(&(1..=50).map(|k| k as f64).collect::<Vec<_>>());
        let cfg = GmresConfig::new(1e-14, 5).unwrap();
        let res = gmres(&a, &vec![1.0; 50], None, &cfg).unwrap();
        assert!(!res.converged);
        assert_eq!(res.iterations, 5);
        assert_eq!(res.history.len(), 6);
    }

    #[test]
    fn zero_rhs_rejected() {
        assert!(gmres(&Identity(2), &[0.0, 0.0], None, &GmresConfig::default()).is_err());
        assert!(GmresConfig::new(0.0, 10).is_err());
        assert!(GmresConfig::new(1e-8, 0).is_err());
    }

    #[test]
    fn arnoldi_relation_holds() {
        let a = SparseMatrix::from_diag(&(1..=30).map(|k| k as f64).collect::<Vec<_>>());
        let cfg = GmresConfig::new(1e-30, 10).unwrap().with_basis();
        let b: Vec<f64> = (0..30).map(|k| 1.0 + (k as f64).sin()).collect();
        let res = gmres(&a, &b, None, &cfg).unwrap();
        let basis = res.basis.unwrap();
        assert_eq!(basis.v.cols(), 11);
        let m = basis.steps();
        let av = a.apply_columns(&basis.v.columns_range(0, m));
        let vh = basis.v.matmul(&basis.h).unwrap();
        assert!(av.sub(&vh).unwrap().frobenius_norm() < 1e-10 * 30.0);
        assert!(basis.v.orthonormality_defect() < 1e-12);
    }

    #[test]
    fn reference_norm_rescales_history() {
        let a = SparseMatrix::from_diag(&[1.0, 2.0, 3.0]);
        let b = [2.0, 0.0, 0.0];
        let cfg = GmresConfig::new(1e-12, 10).unwrap().relative_to(4.0);
        let res = gmres(&a, &b, None, &cfg).unwrap();
        assert_eq!(res.history[0], 0.5);
        assert!(GmresConfig::default().relative_to(0.0).validate().is_err());
    }

    #[test]
    fn csv_has_header_and_rows() {
        let s = history_csv_string(&[1.0, 0.5]);
        assert_eq!(s.lines().count(), 3);
        assert!(s.starts_with("iteration,relative_residual\n0,1e0\n"));
    }
}
