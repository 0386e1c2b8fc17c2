use crate::error::{Error, Result};
use crate::linalg::{
    axpy, dot, ilu0_factor, lu_factor, operator_norm, spectral_norm, DenseMatrix, Ilu0Factors, LinearOperator,
    LuFactors, SparseMatrix,
};

/// Orthonormality tolerance accepted for a coarse basis.
pub const ORTHONORMAL_TOL: f64 = 1e-10;

/// Above this rank `rho_norms` switches from dense products to Lanczos.
const DENSE_RHO_MAX_RANK: usize = 256;
const LANCZOS_STEPS: usize = 200;

/// Nonzero rows of each column of a tall matrix, kept only for columns that
/// are mostly zero.
#[derive(Debug, Clone)]
struct ColumnSupport {
    sparse: Vec<Option<(Vec<usize>, Vec<f64>)>>,
}

impl ColumnSupport {
    fn of(m: &DenseMatrix) -> Self {
        let sparse = m
            .columns()
            .map(|c| {
                let rows: Vec<usize> = (0..c.len()).filter(|&i| c[i] != 0.0).collect();
                (2 * rows.len() < c.len()).then(|| {
                    let vals = rows.iter().map(|&i| c[i]).collect();
                    (rows, vals)
                })
            })
            .collect();
        Self { sparse }
    }

    /// `mᵀ x`.
    fn tr_apply(&self, m: &DenseMatrix, x: &[f64]) -> Vec<f64> {
        self.sparse
            .iter()
            .enumerate()
            .map(|(j, s)| match s {
                Some((rows, vals)) => rows.iter().zip(vals).map(|(&i, v)| v * x[i]).sum(),
                None => dot(m.col(j), x),
            })
            .collect()
    }

    /// `y += alpha · m c`.
    fn add_combination(&self, m: &DenseMatrix, c: &[f64], alpha: f64, y: &mut [f64]) {
        for (j, (&cj, s)) in c.iter().zip(&self.sparse).enumerate() {
            let a = alpha * cj;
            match s {
                Some((rows, vals)) => {
                    for (&i, v) in rows.iter().zip(vals) {
                        y[i] += a * v;
                    }
                }
                None => axpy(a, m.col(j), y),
            }
        }
    }
}

/// How `E⁻¹` is applied.
#[derive(Debug, Clone)]
pub enum SolverKind {
    /// Dense LU of `E` with partial pivoting.
    ExactLu,
    /// ILU(0) of a sparse `E`. `column_groups[j]` is the block id of column
    /// `j` of `Z`; a block `(I, J)` of `E` is structural when any of its
    /// entries is nonzero. With one group per column the pattern is entrywise.
    Ilu0 { column_groups: Vec<usize> },
    /// A caller-supplied surrogate `H ≈ E`, factorized exactly.
    Perturbed(DenseMatrix),
}

#[derive(Debug, Clone)]
enum CoarseSolver {
    Lu(LuFactors),
    Ilu0 { factors: Ilu0Factors, sparse_e: SparseMatrix },
    Perturbed { h: DenseMatrix, lu: LuFactors },
}

/// `E = Zᵀ·B·Z` for an operator `B`, with `B·Z` cached and a factorized
/// solver for `E` (or its surrogate `H`).
#[derive(Debug, Clone)]
pub struct ProjectionOperator {
    z: DenseMatrix,
    bz: DenseMatrix,
    z_support: ColumnSupport,
    bz_support: ColumnSupport,
    e: DenseMatrix,
    solver: CoarseSolver,
    e_asymmetry: f64,
}

fn singular(e: Error) -> Error {
    match e {
        Error::ZeroPivot { row } => Error::SingularProjection(format!(
            "zero pivot at row {row}; Z is not full rank against the operator"
        )),
        other => other,
    }
}

/// Block pattern of `e` from per-column group ids.
fn block_pattern_sparse(e: &DenseMatrix, groups: &[usize]) -> Result<SparseMatrix> {
    let r = e.rows();
    if groups.len() != r {
        return Err(Error::Dimension(format!(
            "{} column groups for a {r}x{r} projection matrix",
            groups.len()
        )));
    }
    let ngroups = groups.iter().copied().max().map_or(0, |g| g + 1);
    let mut structural = vec![false; ngroups * ngroups];
    for j in 0..r {
        for i in 0..r {
            if e[(i, j)] != 0.0 {
                structural[groups[i] * ngroups + groups[j]] = true;
            }
        }
    }
    Ok(SparseMatrix::from_dense_pattern(e, |i, j| {
        i == j || structural[groups[i] * ngroups + groups[j]]
    }))
}

impl ProjectionOperator {
    pub fn new(op: &dyn LinearOperator, z: DenseMatrix, kind: SolverKind) -> Result<Self> {
        if z.rows() != op.dim() {
            return Err(Error::Dimension(format!(
                "Z has {} rows, operator has order {}",
                z.rows(),
                op.dim()
            )));
        }
        if z.cols() == 0 {
            return Err(Error::Invalid("coarse space must have at least one column".into()));
        }
        let deviation = z.orthonormality_defect();
        if deviation > ORTHONORMAL_TOL {
            return Err(Error::NotOrthonormal { deviation });
        }
        let bz = op.apply_columns(&z);
        let z_support = ColumnSupport::of(&z);
        let bz_support = ColumnSupport::of(&bz);
        let r = z.cols();
        let mut e = DenseMatrix::zeros(r, r);
        for j in 0..r {
            e.col_mut(j).copy_from_slice(&z_support.tr_apply(&z, bz.col(j)));
        }
        let e_asymmetry = e.max_asymmetry();
        let solver = match kind {
            SolverKind::ExactLu => CoarseSolver::Lu(lu_factor(&e).map_err(singular)?),
            SolverKind::Ilu0 { column_groups } => {
                let sparse_e = block_pattern_sparse(&e, &column_groups)?;
                let factors = ilu0_factor(&sparse_e).map_err(singular)?;
                CoarseSolver::Ilu0 { factors, sparse_e }
            }
            SolverKind::Perturbed(h) => {
                if h.rows() != e.rows() || h.cols() != e.cols() {
                    return Err(Error::Dimension(format!(
                        "surrogate is {}x{}, E is {}x{}",
                        h.rows(),
                        h.cols(),
                        e.rows(),
                        e.cols()
                    )));
                }
                let lu = lu_factor(&h).map_err(singular)?;
                CoarseSolver::Perturbed { h, lu }
            }
        };
        Ok(Self {
            z,
            bz,
            z_support,
            bz_support,
            e,
            solver,
            e_asymmetry,
        })
    }

    pub fn dim(&self) -> usize {
        self.z.rows()
    }

    pub fn rank(&self) -> usize {
        self.z.cols()
    }

    pub fn z(&self) -> &DenseMatrix {
        &self.z
    }

    /// The operator applied to `Z`.
    pub fn operator_z(&self) -> &DenseMatrix {
        &self.bz
    }

    pub fn e(&self) -> &DenseMatrix {
        &self.e
    }

    /// Largest |e_ij - e_ji|; reported, not enforced.
    pub fn e_asymmetry(&self) -> f64 {
        self.e_asymmetry
    }

    pub fn is_exact(&self) -> bool {
        matches!(self.solver, CoarseSolver::Lu(_))
    }

    /// Sparse `E` used by the ILU(0) surrogate, if any.
    pub fn sparse_e(&self) -> Option<&SparseMatrix> {
        match &self.solver {
            CoarseSolver::Ilu0 { sparse_e, .. } => Some(sparse_e),
            _ => None,
        }
    }

    /// The matrix whose inverse is actually applied (`E`, `L·U`, or `H`).
    pub fn surrogate(&self) -> DenseMatrix {
        match &self.solver {
            CoarseSolver::Lu(_) => self.e.clone(),
            CoarseSolver::Ilu0 { factors, .. } => factors.product(),
            CoarseSolver::Perturbed { h, .. } => h.clone(),
        }
    }

    /// Applies the configured inverse of `E` to a coarse vector.
    pub fn coarse_solve(&self, rhs: &[f64]) -> Vec<f64> {
        match &self.solver {
            CoarseSolver::Lu(f) => f.solve(rhs),
            CoarseSolver::Ilu0 { factors, .. } => factors.solve(rhs),
            CoarseSolver::Perturbed { lu, .. } => lu.solve(rhs),
        }
    }

    fn coarse_solve_transpose(&self, rhs: &[f64]) -> Vec<f64> {
        match &self.solver {
            CoarseSolver::Lu(f) => f.solve_transpose(rhs),
            CoarseSolver::Ilu0 { factors, .. } => factors.solve_transpose(rhs),
            CoarseSolver::Perturbed { lu, .. } => lu.solve_transpose(rhs),
        }
    }

    /// `E⁻¹ Zᵀ x`.
    pub fn coarse_coefficients(&self, x: &[f64]) -> Vec<f64> {
        self.coarse_solve(&self.z_support.tr_apply(&self.z, x))
    }

    /// `y += alpha · Z c`.
    pub fn add_z(&self, c: &[f64], alpha: f64, y: &mut [f64]) {
        self.z_support.add_combination(&self.z, c, alpha, y);
    }

    /// `y += alpha · B Z c`.
    pub fn add_operator_z(&self, c: &[f64], alpha: f64, y: &mut [f64]) {
        self.bz_support.add_combination(&self.bz, c, alpha, y);
    }

    fn surrogate_inverse(&self) -> DenseMatrix {
        let r = self.rank();
        let mut inv = DenseMatrix::zeros(r, r);
        let mut e = vec![0.0; r];
        for j in 0..r {
            e[j] = 1.0;
            inv.col_mut(j).copy_from_slice(&self.coarse_solve(&e));
            e[j] = 0.0;
        }
        inv
    }

    /// `(‖E·H⁻¹ − I‖₂, ‖H⁻¹·E − I‖₂)` for the surrogate `H` in use.
    pub fn rho_norms(&self) -> (f64, f64) {
        let r = self.rank();
        if r > DENSE_RHO_MAX_RANK {
            let minus = |mut y: Vec<f64>, x: &[f64]| {
                axpy(-1.0, x, &mut y);
                y
            };
            let right = operator_norm(
                r,
                |x| minus(self.e.matvec(&self.coarse_solve(x)), x),
                |x| minus(self.coarse_solve_transpose(&self.e.tr_matvec(x)), x),
                LANCZOS_STEPS,
            );
            let left = operator_norm(
                r,
                |x| minus(self.coarse_solve(&self.e.matvec(x)), x),
                |x| minus(self.e.tr_matvec(&self.coarse_solve_transpose(x)), x),
                LANCZOS_STEPS,
            );
            return (right, left);
        }
        let hinv = self.surrogate_inverse();
        let mut right = self.e.matmul(&hinv).expect("square");
        let mut left = hinv.matmul(&self.e).expect("square");
        for i in 0..self.rank() {
            right[(i, i)] -= 1.0;
            left[(i, i)] -= 1.0;
        }
        (spectral_norm(&right), spectral_norm(&left))
    }
}

/// Free-function form of [`ProjectionOperator::new`].
pub fn build_projection(
    op: &dyn LinearOperator,
    z: DenseMatrix,
    kind: SolverKind,
) -> Result<ProjectionOperator> {
    ProjectionOperator::new(op, z, kind)
}
