use crate::error::{Error, Result};
use crate::linalg::SparseMatrix;
use crate::pde::kappa::KappaField;

/// Interior nodes of a uniform grid on [0,1]²; node `(i, j)` sits at
/// `((i+1)·hx, (j+1)·hy)` and has global index `j·nx + i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Grid2D {
    pub nx: usize,
    pub ny: usize,
}

impl Grid2D {
    pub fn new(nx: usize, ny: usize) -> Result<Self> {
        if nx == 0 || ny == 0 {
            return Err(Error::Invalid(format!("grid {nx}x{ny} has no interior nodes")));
        }
        Ok(Self { nx, ny })
    }

    pub fn square(n: usize) -> Result<Self> {
        Self::new(n, n)
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn hx(&self) -> f64 {
        1.0 / (self.nx as f64 + 1.0)
    }

    pub fn hy(&self) -> f64 {
        1.0 / (self.ny as f64 + 1.0)
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    /// Coordinates of grid point `(i, j)` where `i`, `j` may address the
    /// boundary (`-1` or `nx`/`ny`).
    pub fn coords(&self, i: isize, j: isize) -> (f64, f64) {
        ((i + 1) as f64 * self.hx(), (j + 1) as f64 * self.hy())
    }
}

fn harmonic(a: f64, b: f64) -> f64 {
    2.0 * a * b / (a + b)
}

/// Five-point finite-volume discretization of `−∇·(κ∇u) = 1` with
/// homogeneous Dirichlet data. Face coefficients are harmonic means of the
/// nodal κ values; the matrix is not divided by h², so the right-hand side
/// is `hx·hy`.
pub fn assemble(grid: &Grid2D, kappa: &KappaField) -> Result<(SparseMatrix, Vec<f64>)> {
    let (nx, ny) = (grid.nx as isize, grid.ny as isize);
    let sample = |i: isize, j: isize| -> Result<f64> {
        let (x, y) = grid.coords(i, j);
        let k = kappa.eval(x, y);
        if k > 0.0 && k.is_finite() {
            Ok(k)
        } else {
            Err(Error::Invalid(format!("kappa({x}, {y}) = {k} is not positive")))
        }
    };
    let wx = grid.hy() / grid.hx();
    let wy = grid.hx() / grid.hy();
    let mut triplets = Vec::with_capacity(5 * grid.len());
    for j in 0..ny {
        for i in 0..nx {
            let p = grid.index(i as usize, j as usize);
            let kp = sample(i, j)?;
            let mut diag = 0.0;
            for (di, dj, w) in [(-1, 0, wx), (1, 0, wx), (0, -1, wy), (0, 1, wy)] {
                let (qi, qj) = (i + di, j + dj);
                let coeff = w * harmonic(kp, sample(qi, qj)?);
                diag += coeff;
                if (0..nx).contains(&qi) && (0..ny).contains(&qj) {
                    triplets.push((p, grid.index(qi as usize, qj as usize), -coeff));
                }
            }
            triplets.push((p, p, diag));
        }
    }
    let a = SparseMatrix::from_triplets(grid.len(), grid.len(), &triplets)?;
    let rhs = vec![grid.hx() * grid.hy(); grid.len()];
    Ok((a, rhs))
}
