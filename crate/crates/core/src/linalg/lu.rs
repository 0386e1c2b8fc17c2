//! Direct factorizations: dense LU with partial pivoting, banded LU for
//! subdomain solves, and ILU(0) on a CSR pattern.

use crate::error::{Error, Result};
use crate::linalg::dense::DenseMatrix;
use crate::linalg::sparse::SparseMatrix;

/// `P·A = L·U` with unit-lower `L` and upper `U` packed into one matrix.
#[derive(Debug, Clone)]
pub struct LuFactors {
    lu: DenseMatrix,
    /// `perm[i]` is the original row placed at position `i`.
    perm: Vec<usize>,
    swaps: usize,
}

pub fn lu_factor(a: &DenseMatrix) -> Result<LuFactors> {
    if !a.is_square() {
        return Err(Error::Dimension(format!(
            "LU of a {}x{} matrix",
            a.rows(),
            a.cols()
        )));
    }
    let n = a.rows();
    let mut lu = a.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut swaps = 0;
    let tiny = f64::EPSILON * (n as f64) * a.max_abs();
    for k in 0..n {
        let (p, pmax) = (k..n)
            .map(|i| (i, lu[(i, k)].abs()))
            .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if pmax <= tiny || pmax == 0.0 {
            return Err(Error::ZeroPivot { row: k });
        }
        if p != k {
            for j in 0..n {
                let t = lu[(k, j)];
                lu[(k, j)] = lu[(p, j)];
                lu[(p, j)] = t;
            }
            perm.swap(k, p);
            swaps += 1;
        }
        let piv = lu[(k, k)];
        for i in (k + 1)..n {
            lu[(i, k)] /= piv;
        }
        let (head, tail) = lu.as_mut_slice().split_at_mut((k + 1) * n);
        let multipliers = &head[k * n + k + 1..(k + 1) * n];
        for col in tail.chunks_exact_mut(n) {
            let ukj = col[k];
            if ukj != 0.0 {
                for (c, &l) in col[k + 1..].iter_mut().zip(multipliers) {
                    *c -= l * ukj;
                }
            }
        }
    }
    Ok(LuFactors { lu, perm, swaps })
}

impl LuFactors {
    pub fn dim(&self) -> usize {
        self.perm.len()
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        self.solve_permuted_in_place(&mut x);
        x
    }

    fn solve_permuted_in_place(&self, x: &mut [f64]) {
        let n = self.dim();
        for j in 0..n {
            let xj = x[j];
            if xj != 0.0 {
                let col = self.lu.col(j);
                for i in (j + 1)..n {
                    x[i] -= col[i] * xj;
                }
            }
        }
        for j in (0..n).rev() {
            let col = self.lu.col(j);
            x[j] /= col[j];
            let xj = x[j];
            if xj != 0.0 {
                for i in 0..j {
                    x[i] -= col[i] * xj;
                }
            }
        }
    }

    /// Solves `Aᵀ x = b`.
    pub fn solve_transpose(&self, b: &[f64]) -> Vec<f64> {
        let n = self.dim();
        let mut y = b.to_vec();
        // Uᵀ z = b
        for j in 0..n {
            let col = self.lu.col(j);
            let s: f64 = (0..j).map(|i| col[i] * y[i]).sum();
            y[j] = (y[j] - s) / col[j];
        }
        // Lᵀ w = z
        for j in (0..n).rev() {
            let col = self.lu.col(j);
            let s: f64 = ((j + 1)..n).map(|i| col[i] * y[i]).sum();
            y[j] -= s;
        }
        let mut x = vec![0.0; n];
        for (i, &p) in self.perm.iter().enumerate() {
            x[p] = y[i];
        }
        x
    }

    pub fn solve_matrix(&self, b: &DenseMatrix) -> DenseMatrix {
        let mut out = DenseMatrix::zeros(b.rows(), b.cols());
        for j in 0..b.cols() {
            out.col_mut(j).copy_from_slice(&self.solve(b.col(j)));
        }
        out
    }

    pub fn inverse(&self) -> DenseMatrix {
        self.solve_matrix(&DenseMatrix::identity(self.dim()))
    }

    pub fn determinant(&self) -> f64 {
        let d: f64 = self.lu.diag().iter().product();
        if self.swaps % 2 == 0 {
            d
        } else {
            -d
        }
    }

    pub fn lower(&self) -> DenseMatrix {
        let n = self.dim();
        DenseMatrix::from_fn(n, n, |i, j| match i.cmp(&j) {
            std::cmp::Ordering::Greater => self.lu[(i, j)],
            std::cmp::Ordering::Equal => 1.0,
            std::cmp::Ordering::Less => 0.0,
        })
    }

    pub fn upper(&self) -> DenseMatrix {
        let n = self.dim();
        DenseMatrix::from_fn(n, n, |i, j| if i <= j { self.lu[(i, j)] } else { 0.0 })
    }

    pub fn permutation(&self) -> &[usize] {
        &self.perm
    }
}

pub fn lu_solve(f: &LuFactors, b: &[f64]) -> Vec<f64> {
    f.solve(b)
}

/// Unpivoted LU in band storage, for SPD subdomain matrices.
#[derive(Debug, Clone)]
pub struct BandLu {
    n: usize,
    lower_bw: usize,
    upper_bw: usize,
    width: usize,
    band: Vec<f64>,
}

impl BandLu {
    pub fn factor(a: &SparseMatrix) -> Result<Self> {
        if a.rows() != a.cols() {
            return Err(Error::Dimension("band LU of a non-square matrix".into()));
        }
        let n = a.rows();
        let (mut kl, mut ku) = (0usize, 0usize);
        for i in 0..n {
            for (j, _) in a.row(i) {
                if j < i {
                    kl = kl.max(i - j);
                } else {
                    ku = ku.max(j - i);
                }
            }
        }
        let width = kl + ku + 1;
        let mut band = vec![0.0; n * width];
        for i in 0..n {
            for (j, v) in a.row(i) {
                band[i * width + (j + kl - i)] = v;
            }
        }
        let scale = a.values().iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let tiny = f64::EPSILON * scale;
        for k in 0..n {
            let piv = band[k * width + kl];
            if piv.abs() <= tiny || piv == 0.0 {
                return Err(Error::ZeroPivot { row: k });
            }
            let jmax = (k + ku + 1).min(n);
            for i in (k + 1)..(k + kl + 1).min(n) {
                let ik = i * width + (k + kl - i);
                let l = band[ik] / piv;
                band[ik] = l;
                if l == 0.0 {
                    continue;
                }
                for j in (k + 1)..jmax {
                    band[i * width + (j + kl - i)] -= l * band[k * width + (j + kl - k)];
                }
            }
        }
        Ok(Self {
            n,
            lower_bw: kl,
            upper_bw: ku,
            width,
            band,
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn bandwidths(&self) -> (usize, usize) {
        (self.lower_bw, self.upper_bw)
    }

    pub fn solve_in_place(&self, x: &mut [f64]) {
        let (n, kl, ku, w) = (self.n, self.lower_bw, self.upper_bw, self.width);
        for i in 0..n {
            let mut s = x[i];
            for j in i.saturating_sub(kl)..i {
                s -= self.band[i * w + (j + kl - i)] * x[j];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in (i + 1)..(i + ku + 1).min(n) {
                s -= self.band[i * w + (j + kl - i)] * x[j];
            }
            x[i] = s / self.band[i * w + kl];
        }
    }
}

/// ILU(0): `L` (unit lower) and `U` share the sparsity pattern of the input.
#[derive(Debug, Clone)]
pub struct Ilu0Factors {
    lu: SparseMatrix,
    diag_pos: Vec<usize>,
}

pub fn ilu0_factor(a: &SparseMatrix) -> Result<Ilu0Factors> {
    if a.rows() != a.cols() {
        return Err(Error::Dimension("ILU(0) of a non-square matrix".into()));
    }
    let n = a.rows();
    let mut lu = a.clone();
    let row_ptr = lu.row_ptr().to_vec();
    let col_idx = lu.col_idx().to_vec();
    let mut diag_pos = vec![usize::MAX; n];
    for i in 0..n {
        for k in row_ptr[i]..row_ptr[i + 1] {
            if col_idx[k] == i {
                diag_pos[i] = k;
            }
        }
        if diag_pos[i] == usize::MAX {
            return Err(Error::ZeroPivot { row: i });
        }
    }
    let vals = lu.values_mut();
    // position of column j in the current row, or MAX
    let mut where_in_row = vec![usize::MAX; n];
    for i in 0..n {
        let (start, end) = (row_ptr[i], row_ptr[i + 1]);
        for k in start..end {
            where_in_row[col_idx[k]] = k;
        }
        for kk in start..end {
            let k = col_idx[kk];
            if k >= i {
                break;
            }
            let piv = vals[diag_pos[k]];
            if piv == 0.0 {
                return Err(Error::ZeroPivot { row: k });
            }
            let lik = vals[kk] / piv;
            vals[kk] = lik;
            for p in (diag_pos[k] + 1)..row_ptr[k + 1] {
                let pos = where_in_row[col_idx[p]];
                if pos != usize::MAX {
                    vals[pos] -= lik * vals[p];
                }
            }
        }
        if vals[diag_pos[i]] == 0.0 {
            return Err(Error::ZeroPivot { row: i });
        }
        for k in start..end {
            where_in_row[col_idx[k]] = usize::MAX;
        }
    }
    Ok(Ilu0Factors { lu, diag_pos })
}

impl Ilu0Factors {
    pub fn dim(&self) -> usize {
        self.diag_pos.len()
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.dim();
        let (rp, ci, v) = (self.lu.row_ptr(), self.lu.col_idx(), self.lu.values());
        let mut x = b.to_vec();
        for i in 0..n {
            let mut s = x[i];
            for k in rp[i]..self.diag_pos[i] {
                s -= v[k] * x[ci[k]];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for k in (self.diag_pos[i] + 1)..rp[i + 1] {
                s -= v[k] * x[ci[k]];
            }
            x[i] = s / v[self.diag_pos[i]];
        }
        x
    }

    /// Solves `(L·U)ᵀ x = b`.
    pub fn solve_transpose(&self, b: &[f64]) -> Vec<f64> {
        let n = self.dim();
        let (rp, ci, v) = (self.lu.row_ptr(), self.lu.col_idx(), self.lu.values());
        let mut x = b.to_vec();
        for i in 0..n {
            x[i] /= v[self.diag_pos[i]];
            let xi = x[i];
            for k in (self.diag_pos[i] + 1)..rp[i + 1] {
                x[ci[k]] -= v[k] * xi;
            }
        }
        for i in (0..n).rev() {
            let xi = x[i];
            for k in rp[i]..self.diag_pos[i] {
                x[ci[k]] -= v[k] * xi;
            }
        }
        x
    }

    /// Unit-lower factor as CSR (pattern ⊆ input's strict lower part plus the diagonal).
    pub fn lower(&self) -> SparseMatrix {
        let n = self.dim();
        let mut t = Vec::new();
        for i in 0..n {
            for (j, v) in self.lu.row(i) {
                if j < i {
                    t.push((i, j, v));
                }
            }
            t.push((i, i, 1.0));
        }
        SparseMatrix::from_triplets(n, n, &t).expect("valid pattern")
    }

    pub fn upper(&self) -> SparseMatrix {
        let n = self.dim();
        let mut t = Vec::new();
        for i in 0..n {
            for (j, v) in self.lu.row(i) {
                if j >= i {
                    t.push((i, j, v));
                }
            }
        }
        SparseMatrix::from_triplets(n, n, &t).expect("valid pattern")
    }

    /// The matrix `L·U` the factors represent.
    pub fn product(&self) -> DenseMatrix {
        self.lower()
            .to_dense()
            .matmul(&self.upper().to_dense())
            .expect("square factors")
    }
}

pub fn ilu0_solve(f: &Ilu0Factors, b: &[f64]) -> Vec<f64> {
    f.solve(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::dense::norm2;

    #[test]
    fn identity_solve() {
        let f = lu_factor(&DenseMatrix::identity(4)).unwrap();
        assert_eq!(f.solve(&[1.0, 2.0, 3.0, 4.0]), vec![1.0, 2.0, 3.0, 4.0]);
    }

    #[test]
    fn diagonal_solve() {
        let f = lu_factor(&DenseMatrix::from_diag(&[2.0, 4.0])).unwrap();
        assert_eq!(f.solve(&[2.0, 4.0]), vec![1.0, 1.0]);
    }

    #[test]
    fn pivoting_and_transpose_solve() {
        let a = DenseMatrix::from_row_major(3, 3, &[0.0, 2.0, 1.0, 1.0, 1.0, 0.0, 3.0, 0.0, 1.0]).unwrap();
        let f = lu_factor(&a).unwrap();
        let b = [1.0, 2.0, 3.0];
        let x = f.solve(&b);
        let r: Vec<f64> = a.matvec(&x).iter().zip(&b).map(|(p, q)| p - q).collect();
        assert!(norm2(&r) < 1e-14);
        let xt = f.solve_transpose(&b);
        let rt: Vec<f64> = a.tr_matvec(&xt).iter().zip(&b).map(|(p, q)| p - q).collect();
        assert!(norm2(&rt) < 1e-14);
        // det = 0*(1-0) - 2*(1-0) + 1*(0-3) = -5
        assert!((f.determinant() + 5.0).abs() < 1e-13);
    }

    #[test]
    fn zero_pivot_names_row() {
        let a = DenseMatrix::from_row_major(2, 2, &[1.0, 2.0, 2.0, 4.0]).unwrap();
        match lu_factor(&a) {
            Err(Error::ZeroPivot { row }) => assert_eq!(row, 1),
            other => panic!("expected zero pivot, got {other:?}"),
        }
    }

    #[test]
    fn band_lu_matches_dense() {
        let n = 12;
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, 4.0));
            if i + 1 < n {
                t.push((i, i + 1, -1.0));
                t.push((i + 1, i, -1.5));
            }
            if i + 3 < n {
                t.push((i, i + 3, -0.5));
                t.push((i + 3, i, -0.25));
            }
        }
        let a = SparseMatrix::from_triplets(n, n, &t).unwrap();
        let band = BandLu::factor(&a).unwrap();
        assert_eq!(band.bandwidths(), (3, 3));
        let b: Vec<f64> = (0..n).map(|i| (i as f64).sin()).collect();
        let mut x = b.clone();
        band.solve_in_place(&mut x);
        let dense = lu_factor(&a.to_dense()).unwrap().solve(&b);
        for (p, q) in x.iter().zip(&dense) {
            assert!((p - q).abs() < 1e-13);
        }
    }

    #[test]
    fn ilu0_missing_diagonal_is_zero_pivot() {
        let a = SparseMatrix::from_triplets(2, 2, &[(0, 1, 1.0), (1, 0, 1.0)]).unwrap();
        assert!(matches!(ilu0_factor(&a), Err(Error::ZeroPivot { row: 0 })));
    }

    #[test]
    fn ilu0_drops_fill() {
        // arrow pattern: exact LU fills the trailing block, ILU(0) must not
        let n = 5;
        let mut t = vec![];
        for i in 0..n {
            t.push((i, i, 10.0));
            if i > 0 {
                t.push((0, i, 1.0));
                t.push((i, 0, 1.0));
            }
        }
        let a = SparseMatrix::from_triplets(n, n, &t).unwrap();
        let f = ilu0_factor(&a).unwrap();
        let l = f.lower();
        let u = f.upper();
        for i in 0..n {
            for (j, _) in l.row(i).chain(u.row(i)) {
                assert!(i == j || a.get(i, j) != 0.0, "fill at ({i},{j})");
            }
        }
        let lu = f.product();
        assert!((lu[(1, 2)] - 0.1).abs() < 1e-14, "dropped fill reappears in LU product");
    }

    #[test]
    fn ilu0_transpose_solve_matches_product() {
        let t = [
            (0, 0, 4.0), (0, 1, 1.0), (1, 0, 2.0), (1, 1, 5.0),
            (1, 2, -1.0), (2, 1, 0.5), (2, 2, 3.0), (0, 2, 0.25),
        ];
        let a = SparseMatrix::from_triplets(3, 3, &t).unwrap();
        let f = ilu0_factor(&a).unwrap();
        let b = [1.0, -2.0, 0.5];
        let x = f.solve_transpose(&b);
        let back = f.product().transpose().matvec(&x);
        let diff: Vec<f64> = back.iter().zip(&b).map(|(u, v)| u - v).collect();
        assert!(norm2(&diff) < 1e-13);
    }
}
