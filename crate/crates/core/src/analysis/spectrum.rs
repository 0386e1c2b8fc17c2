use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::linalg::{general_eig_real, sym_eig, sym_eigvals, DenseMatrix, LinearOperator};

pub const DEFAULT_SPECTRUM_CAP: usize = 2500;
/// A spectrum counts as real when `max|imag| ≤ REALNESS_REL_TOL · radius`.
pub const REALNESS_REL_TOL: f64 = 1e-8;
const SYMMETRIC_REL_TOL: f64 = 1e-10;

/// `Λ` (the `r` smallest eigenvalues of `A`) and `Λ⊥` (the rest).
#[derive(Debug, Clone)]
pub struct SpectralSplit {
    /// Ascending.
    pub lambda: Vec<f64>,
    /// Ascending.
    pub lambda_perp: Vec<f64>,
    pub v: Option<DenseMatrix>,
    pub v_perp: Option<DenseMatrix>,
}

impl SpectralSplit {
    pub fn from_eigenvalues(eigenvalues: &[f64], r: usize) -> Result<Self> {
        let n = eigenvalues.len();
        if r == 0 || r >= n {
            return Err(Error::Invalid(format!("split size {r} must lie in 1..{n}")));
        }
        let mut sorted = eigenvalues.to_vec();
        sorted.sort_by(f64::total_cmp);
        Ok(Self {
            lambda: sorted[..r].to_vec(),
            lambda_perp: sorted[r..].to_vec(),
            v: None,
            v_perp: None,
        })
    }

    /// Eigendecomposition of symmetric `a`, keeping both bases.
    pub fn from_matrix(a: &DenseMatrix, r: usize) -> Result<Self> {
        let n = a.rows();
        if r == 0 || r >= n {
            return Err(Error::Invalid(format!("split size {r} must lie in 1..{n}")));
        }
        let dec = sym_eig(a)?;
        Ok(Self {
            lambda: dec.eigenvalues[..r].to_vec(),
            lambda_perp: dec.eigenvalues[r..].to_vec(),
            v: Some(dec.eigenvectors.columns_range(0, r)),
            v_perp: Some(dec.eigenvectors.columns_range(r, n)),
        })
    }

    pub fn r(&self) -> usize {
        self.lambda.len()
    }

    pub fn n(&self) -> usize {
        self.lambda.len() + self.lambda_perp.len()
    }

    pub fn lambda_min(&self) -> f64 {
        self.lambda[0]
    }

    /// Also `‖Λ‖₂` for SPD `A`.
    pub fn lambda_max(&self) -> f64 {
        *self.lambda.last().unwrap()
    }

    pub fn perp_min(&self) -> f64 {
        self.lambda_perp[0]
    }

    /// Also `λ_max(A)`.
    pub fn perp_max(&self) -> f64 {
        *self.lambda_perp.last().unwrap()
    }
}

/// Eigenvalues of a materialized operator: real parts ascending, with
/// aligned imaginary parts.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub re: Vec<f64>,
    pub im: Vec<f64>,
    pub max_imag: f64,
    /// The symmetric eigensolver was used.
    pub symmetric: bool,
}

impl Spectrum {
    pub fn len(&self) -> usize {
        self.re.len()
    }

    pub fn is_empty(&self) -> bool {
        self.re.is_empty()
    }

    pub fn spectral_radius(&self) -> f64 {
        self.re.iter().zip(&self.im).fold(0.0f64, |m, (r, i)| m.max(r.hypot(*i)))
    }

    pub fn is_real(&self) -> bool {
        self.max_imag <= REALNESS_REL_TOL * self.spectral_radius()
    }

    /// Number of eigenvalues within `tol` of `center`.
    pub fn count_near(&self, center: f64, tol: f64) -> usize {
        self.re
            .iter()
            .zip(&self.im)
            .filter(|(r, i)| (*r - center).hypot(**i) <= tol)
            .count()
    }
}

/// Spectrum of a dense matrix; the symmetric path is used when the
/// asymmetry is within 1e-10 of the largest entry.
pub fn spectrum_of_dense(m: &DenseMatrix) -> Result<Spectrum> {
    if !m.is_square() {
        return Err(Error::Dimension(format!("spectrum of a {}x{} matrix", m.rows(), m.cols())));
    }
    if m.max_asymmetry() <= SYMMETRIC_REL_TOL * m.max_abs() {
        let n = m.rows();
        let sym = DenseMatrix::from_fn(n, n, |i, j| 0.5 * (m[(i, j)] + m[(j, i)]));
        let re = sym_eigvals(&sym)?;
        return Ok(Spectrum {
            im: vec![0.0; re.len()],
            re,
            max_imag: 0.0,
            symmetric: true,
        });
    }
    let s = general_eig_real(m, 0.0)?;
    Ok(Spectrum {
        re: s.re,
        im: s.im,
        max_imag: s.max_imag,
        symmetric: false,
    })
}

pub fn spectrum_of_capped(op: &dyn LinearOperator, cap: usize) -> Result<Spectrum> {
    let n = op.dim();
    if n > cap {
        return Err(Error::SpectrumCap { n, cap });
    }
    spectrum_of_dense(&op.to_dense())
}

/// Dense spectrum of an operator of order at most [`DEFAULT_SPECTRUM_CAP`].
pub fn spectrum_of(op: &dyn LinearOperator) -> Result<Spectrum> {
    spectrum_of_capped(op, DEFAULT_SPECTRUM_CAP)
}

/// `index,eigenvalue,imag` lines.
pub fn spectrum_csv_string(s: &Spectrum) -> String {
    let mut out = String::from("index,eigenvalue,imag\n");
    for (k, (r, i)) in s.re.iter().zip(&s.im).enumerate() {
        let _ = writeln!(out, "{k},{r:e},{i:e}");
    }
    out
}
