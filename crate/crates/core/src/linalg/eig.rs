//! Eigenvalue solvers.
//!
//! Symmetric matrices go through Householder tridiagonalization followed by
//! the implicit QL iteration; general real matrices through Householder
//! reduction to upper Hessenberg form and the Francis double-shift QR
//! iteration (eigenvalues only).

use crate::error::{Error, Result};
use crate::linalg::dense::DenseMatrix;

/// Symmetry tolerance, relative to the largest entry.
pub const SYMMETRY_TOL: f64 = 1e-12;

const MAX_QL_ITERS: usize = 60;
const MAX_QR_ITERS: usize = 60;

#[derive(Debug, Clone)]
pub struct SymEigDecomposition {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Orthonormal; column `i` pairs with `eigenvalues[i]`.
    pub eigenvectors: DenseMatrix,
}

impl SymEigDecomposition {
    /// `V Λ Vᵀ`.
    pub fn reconstruct(&self) -> DenseMatrix {
        let v = &self.eigenvectors;
        let n = v.rows();
        let mut out = DenseMatrix::zeros(n, n);
        for (k, &lam) in self.eigenvalues.iter().enumerate() {
            let vk = v.col(k);
            for j in 0..n {
                let s = lam * vk[j];
                if s != 0.0 {
                    crate::linalg::axpy(s, vk, out.col_mut(j));
                }
            }
        }
        out
    }
}

fn check_symmetric(a: &DenseMatrix) -> Result<()> {
    if !a.is_square() {
        return Err(Error::Dimension(format!(
            "eigenproblem for a {}x{} matrix",
            a.rows(),
            a.cols()
        )));
    }
    let asym = a.max_asymmetry();
    if asym > SYMMETRY_TOL * a.max_abs() {
        return Err(Error::NotSymmetric { max_asymmetry: asym });
    }
    Ok(())
}

/// Full symmetric eigendecomposition, eigenvalues ascending.
pub fn sym_eig(a: &DenseMatrix) -> Result<SymEigDecomposition> {
    check_symmetric(a)?;
    let (d, v) = tridiagonal_ql(a, true)?;
    Ok(SymEigDecomposition {
        eigenvalues: d,
        eigenvectors: v.expect("vectors requested"),
    })
}

/// Eigenvalues only, ascending.
pub fn sym_eigvals(a: &DenseMatrix) -> Result<Vec<f64>> {
    check_symmetric(a)?;
    Ok(tridiagonal_ql(a, false)?.0)
}

/// Householder tridiagonalization + implicit QL. Works on a column-major copy;
/// the lower triangle of `a` is used.
fn tridiagonal_ql(a: &DenseMatrix, want_vectors: bool) -> Result<(Vec<f64>, Option<DenseMatrix>)> {
    let n = a.rows();
    if n == 0 {
        return Ok((vec![], want_vectors.then(|| DenseMatrix::zeros(0, 0))));
    }
    // v[(r, c)] stored at c * n + r; the algorithm below reads entry (r, c)
    // as "row r, column c" of the symmetric working matrix
    let mut v = a.clone().into_vec();
    let at = |r: usize, c: usize| c * n + r;
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];

    for j in 0..n {
        d[j] = v[at(n - 1, j)];
    }
    for i in (1..n).rev() {
        let mut scale = 0.0;
        let mut h = 0.0;
        for k in 0..i {
            scale += d[k].abs();
        }
        if scale == 0.0 {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v[at(i - 1, j)];
                v[at(i, j)] = 0.0;
                v[at(j, i)] = 0.0;
            }
        } else {
            for k in 0..i {
                d[k] /= scale;
                h += d[k] * d[k];
            }
            let mut f = d[i - 1];
            let mut g = h.sqrt();
            if f > 0.0 {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for ej in e.iter_mut().take(i) {
                *ej = 0.0;
            }
            for j in 0..i {
                f = d[j];
                v[at(j, i)] = f;
                g = e[j] + v[at(j, j)] * f;
                for k in (j + 1)..i {
                    let vkj = v[at(k, j)];
                    g += vkj * d[k];
                    e[k] += vkj * f;
                }
                e[j] = g;
            }
            f = 0.0;
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                f = d[j];
                g = e[j];
                let col = &mut v[j * n..(j + 1) * n];
                for k in j..i {
                    col[k] -= f * e[k] + g * d[k];
                }
                d[j] = v[at(i - 1, j)];
                v[at(i, j)] = 0.0;
            }
        }
        d[i] = h;
    }

    if want_vectors {
        for i in 0..n - 1 {
            v[at(n - 1, i)] = v[at(i, i)];
            v[at(i, i)] = 1.0;
            let h = d[i + 1];
            if h != 0.0 {
                for k in 0..=i {
                    d[k] = v[at(k, i + 1)] / h;
                }
                for j in 0..=i {
                    let mut g = 0.0;
                    for k in 0..=i {
                        g += v[at(k, i + 1)] * v[at(k, j)];
                    }
                    let col = &mut v[j * n..(j + 1) * n];
                    for k in 0..=i {
                        col[k] -= g * d[k];
                    }
                }
            }
            for k in 0..=i {
                v[at(k, i + 1)] = 0.0;
            }
        }
        for j in 0..n {
            d[j] = v[at(n - 1, j)];
            v[at(n - 1, j)] = 0.0;
        }
        v[at(n - 1, n - 1)] = 1.0;
    } else {
        for j in 0..n {
            d[j] = v[at(j, j)];
        }
    }
    e[0] = 0.0;

    // implicit QL on (d, e)
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;
    let mut f = 0.0;
    let mut tst1 = 0.0f64;
    let eps = f64::EPSILON;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > MAX_QL_ITERS {
                    return Err(Error::NoConvergence { iterations: iter });
                }
                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().skip(l + 2) {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    if want_vectors {
                        let (left, right) = v.split_at_mut((i + 1) * n);
                        let ci = &mut left[i * n..];
                        let ci1 = &mut right[..n];
                        for k in 0..n {
                            let hk = ci1[k];
                            ci1[k] = s * ci[k] + c * hk;
                            ci[k] = c * ci[k] - s * hk;
                        }
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[i].total_cmp(&d[j]));
    let vals: Vec<f64> = order.iter().map(|&i| d[i]).collect();
    let vecs = want_vectors.then(|| {
        let mut out = DenseMatrix::zeros(n, n);
        for (dst, &src) in order.iter().enumerate() {
            out.col_mut(dst).copy_from_slice(&v[src * n..(src + 1) * n]);
        }
        out
    });
    Ok((vals, vecs))
}

/// Eigenvalues of a general real matrix, reported as real parts with the
/// matching imaginary parts so callers can test a realness hypothesis.
#[derive(Debug, Clone, PartialEq)]
pub struct RealSpectrum {
    /// Real parts, ascending (ties broken by imaginary part).
    pub re: Vec<f64>,
    /// Imaginary parts aligned with `re`.
    pub im: Vec<f64>,
    pub max_imag: f64,
    /// `max_imag <= imag_tol` for the tolerance passed in.
    pub is_real: bool,
}

pub fn general_eig_real(b: &DenseMatrix, imag_tol: f64) -> Result<RealSpectrum> {
    if !b.is_square() {
        return Err(Error::Dimension(format!(
            "eigenproblem for a {}x{} matrix",
            b.rows(),
            b.cols()
        )));
    }
    let mut h = b.clone();
    hessenberg_in_place(&mut h);
    let (wr, wi) = hessenberg_qr(&mut h)?;
    let mut pairs: Vec<(f64, f64)> = wr.into_iter().zip(wi).collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    let max_imag = pairs.iter().fold(0.0f64, |m, p| m.max(p.1.abs()));
    Ok(RealSpectrum {
        re: pairs.iter().map(|p| p.0).collect(),
        im: pairs.iter().map(|p| p.1).collect(),
        max_imag,
        is_real: max_imag <= imag_tol,
    })
}

/// Orthogonal similarity to upper Hessenberg form. Columns that are already
/// reduced are skipped, so nearly-triangular inputs are cheap.
pub(crate) fn hessenberg_in_place(h: &mut DenseMatrix) {
    let n = h.rows();
    if n < 3 {
        return;
    }
    let mut ort = vec![0.0; n];
    let mut f = vec![0.0; n];
    for m in 1..n - 1 {
        let col = h.col(m - 1);
        let Some(high) = (m..n).rev().find(|&i| col[i] != 0.0) else {
            continue;
        };
        if high == m {
            continue;
        }
        let scale: f64 = col[m..=high].iter().map(|v| v.abs()).sum();
        let mut hsum = 0.0;
        for i in (m..=high).rev() {
            ort[i] = col[i] / scale;
            hsum += ort[i] * ort[i];
        }
        let mut g = hsum.sqrt();
        if ort[m] > 0.0 {
            g = -g;
        }
        hsum -= ort[m] * g;
        ort[m] -= g;
        let u = &ort[m..=high];

        // left: H ← (I - u uᵀ/h) H on rows m..=high
        for j in m - 1..n {
            let c = h.col_mut(j);
            let s: f64 = c[m..=high].iter().zip(u).map(|(a, b)| a * b).sum::<f64>() / hsum;
            if s != 0.0 {
                for (ci, &ui) in c[m..=high].iter_mut().zip(u) {
                    *ci -= s * ui;
                }
            }
        }
        // right: H ← H (I - u uᵀ/h) on columns m..=high
        f.iter_mut().for_each(|x| *x = 0.0);
        for (k, &uk) in u.iter().enumerate() {
            if uk != 0.0 {
                crate::linalg::axpy(uk, h.col(m + k), &mut f);
            }
        }
        for (k, &uk) in u.iter().enumerate() {
            let s = uk / hsum;
            if s != 0.0 {
                crate::linalg::axpy(-s, &f, h.col_mut(m + k));
            }
        }
        let c = h.col_mut(m - 1);
        for ci in c[(m + 1)..=high].iter_mut() {
            *ci = 0.0;
        }
    }
}

/// Francis double-shift QR on an upper Hessenberg matrix (destroyed).
fn hessenberg_qr(a: &mut DenseMatrix) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = a.rows();
    let mut wr = vec![0.0; n];
    let mut wi = vec![0.0; n];
    if n == 0 {
        return Ok((wr, wi));
    }
    let mut anorm = 0.0;
    for i in 0..n {
        for j in i.saturating_sub(1)..n {
            anorm += a[(i, j)].abs();
        }
    }
    let mut nn = n as isize - 1;
    let mut t = 0.0;
    while nn >= 0 {
        let mut its = 0;
        loop {
            let nu = nn as usize;
            let mut l = nu;
            while l >= 1 {
                let mut s = a[(l - 1, l - 1)].abs() + a[(l, l)].abs();
                if s == 0.0 {
                    s = anorm;
                }
                if a[(l, l - 1)].abs() + s == s {
                    a[(l, l - 1)] = 0.0;
                    break;
                }
                l -= 1;
            }
            let mut x = a[(nu, nu)];
            if l == nu {
                wr[nu] = x + t;
                wi[nu] = 0.0;
                nn -= 1;
                break;
            }
            let mut y = a[(nu - 1, nu - 1)];
            let mut w = a[(nu, nu - 1)] * a[(nu - 1, nu)];
            if l == nu - 1 {
                let p = 0.5 * (y - x);
                let q = p * p + w;
                let mut z = q.abs().sqrt();
                x += t;
                if q >= 0.0 {
                    z = p + z.copysign(p);
                    wr[nu - 1] = x + z;
                    wr[nu] = x + z;
                    if z != 0.0 {
                        wr[nu] = x - w / z;
                    }
                    wi[nu - 1] = 0.0;
                    wi[nu] = 0.0;
                } else {
                    wr[nu - 1] = x + p;
                    wr[nu] = x + p;
                    wi[nu - 1] = -z;
                    wi[nu] = z;
                }
                nn -= 2;
                break;
            }
            if its == MAX_QR_ITERS {
                return Err(Error::NoConvergence { iterations: its });
            }
            if its > 0 && its % 10 == 0 {
                // exceptional shift
                t += x;
                for i in 0..=nu {
                    a[(i, i)] -= x;
                }
                let s = a[(nu, nu - 1)].abs() + a[(nu - 1, nu - 2)].abs();
                x = 0.75 * s;
                y = x;
                w = -0.4375 * s * s;
            }
            its += 1;

            let mut m = nu - 2;
            let (mut p, mut q, mut r);
            loop {
                let z = a[(m, m)];
                let rr = x - z;
                let ss = y - z;
                p = (rr * ss - w) / a[(m + 1, m)] + a[(m, m + 1)];
                q = a[(m + 1, m + 1)] - z - rr - ss;
                r = a[(m + 2, m + 1)];
                let s = p.abs() + q.abs() + r.abs();
                p /= s;
                q /= s;
                r /= s;
                if m == l {
                    break;
                }
                let u = a[(m, m - 1)].abs() * (q.abs() + r.abs());
                let v = p.abs() * (a[(m - 1, m - 1)].abs() + z.abs() + a[(m + 1, m + 1)].abs());
                if u + v == v {
                    break;
                }
                m -= 1;
            }
            for i in (m + 2)..=nu {
                a[(i, i - 2)] = 0.0;
                if i != m + 2 {
                    a[(i, i - 3)] = 0.0;
                }
            }
            let mut k = m;
            while k < nu {
                if k != m {
                    p = a[(k, k - 1)];
                    q = a[(k + 1, k - 1)];
                    r = 0.0;
                    if k != nu - 1 {
                        r = a[(k + 2, k - 1)];
                    }
                    x = p.abs() + q.abs() + r.abs();
                    if x != 0.0 {
                        p /= x;
                        q /= x;
                        r /= x;
                    }
                }
                let s = (p * p + q * q + r * r).sqrt().copysign(p);
                if s != 0.0 {
                    if k == m {
                        if l != m {
                            a[(k, k - 1)] = -a[(k, k - 1)];
                        }
                    } else {
                        a[(k, k - 1)] = -s * x;
                    }
                    p += s;
                    x = p / s;
                    y = q / s;
                    let z = r / s;
                    q /= p;
                    r /= p;
                    for j in k..=nu {
                        let mut pp = a[(k, j)] + q * a[(k + 1, j)];
                        if k != nu - 1 {
                            pp += r * a[(k + 2, j)];
                            a[(k + 2, j)] -= pp * z;
                        }
                        a[(k + 1, j)] -= pp * y;
                        a[(k, j)] -= pp * x;
                    }
                    let mmin = if nu < k + 3 { nu } else { k + 3 };
                    for i in l..=mmin {
                        let mut pp = x * a[(i, k)] + y * a[(i, k + 1)];
                        if k != nu - 1 {
                            pp += z * a[(i, k + 2)];
                            a[(i, k + 2)] -= pp * r;
                        }
                        a[(i, k + 1)] -= pp * q;
                        a[(i, k)] -= pp;
                    }
                }
                k += 1;
            }
        }
    }
    Ok((wr, wi))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_case() {
        let d = sym_eig(&DenseMatrix::from_diag(&[1.0, 2.0, 3.0])).unwrap();
        assert_eq!(d.eigenvalues, vec![1.0, 2.0, 3.0]);
        for i in 0..3 {
            for j in 0..3 {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((d.eigenvectors[(i, j)].abs() - expect).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn two_by_two() {
        let a = DenseMatrix::from_row_major(2, 2, &[2.0, 1.0, 1.0, 2.0]).unwrap();
        let d = sym_eig(&a).unwrap();
        assert!((d.eigenvalues[0] - 1.0).abs() < 1e-14);
        assert!((d.eigenvalues[1] - 3.0).abs() < 1e-14);
        let vals = sym_eigvals(&a).unwrap();
        assert!((vals[0] - 1.0).abs() < 1e-14 && (vals[1] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn asymmetric_rejected() {
        let a = DenseMatrix::from_row_major(2, 2, &[1.0, 0.5, 0.0, 1.0]).unwrap();
        match sym_eig(&a) {
            Err(Error::NotSymmetric { max_asymmetry }) => assert_eq!(max_asymmetry, 0.5),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn identity_general() {
        let s = general_eig_real(&DenseMatrix::identity(4), 1e-12).unwrap();
        assert_eq!(s.re, vec![1.0; 4]);
        assert_eq!(s.max_imag, 0.0);
        assert!(s.is_real);
    }

    #[test]
    fn rotation_is_complex() {
        let a = DenseMatrix::from_row_major(2, 2, &[0.0, -1.0, 1.0, 0.0]).unwrap();
        let s = general_eig_real(&a, 1e-12).unwrap();
        assert!((s.max_imag - 1.0).abs() < 1e-14);
        assert!(!s.is_real);
    }

    #[test]
    fn companion_roots() {
        // (x-1)(x-2)(x-3)(x-4) = x^4 - 10x^3 + 35x^2 - 50x + 24
        let a = DenseMatrix::from_row_major(
            4,
            4,
            &[10.0, -35.0, 50.0, -24.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0],
        )
        .unwrap();
        let s = general_eig_real(&a, 1e-10).unwrap();
        for (got, want) in s.re.iter().zip([1.0, 2.0, 3.0, 4.0]) {
            assert!((got - want).abs() < 1e-10, "{got} vs {want}");
        }
    }
}
