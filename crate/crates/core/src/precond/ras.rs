//! One-level restricted additive Schwarz.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{BandLu, LinearOperator, SparseMatrix};
use crate::pde::Decomposition;

#[derive(Debug, Clone)]
struct Subdomain {
    /// Sorted global indices of the overlapping set.
    indices: Vec<usize>,
    /// `(local, global)` for the unknowns this subdomain owns.
    owned: Vec<(usize, usize)>,
    factor: BandLu,
}

/// `M⁻¹ x = Σᵢ R̃ᵢᵀ Aᵢ⁻¹ Rᵢ x`, where `Rᵢ` restricts to the overlapping set
/// and `R̃ᵢᵀ` prolongates only the unknowns subdomain `i` owns.
#[derive(Debug, Clone)]
pub struct RasPreconditioner {
    n: usize,
    subdomains: Vec<Subdomain>,
}

impl RasPreconditioner {
    pub fn new(a: &SparseMatrix, dec: &Decomposition) -> Result<Self> {
        if a.rows() != a.cols() || a.rows() != dec.n {
            return Err(Error::Dimension(format!(
                "decomposition of {} unknowns for a {}x{} matrix",
                dec.n,
                a.rows(),
                a.cols()
            )));
        }
        dec.validate()?;
        let subdomains = dec
            .overlapping
            .par_iter()
            .enumerate()
            .map(|(i, idx)| {
                let local = a.principal_submatrix(idx);
                let factor = BandLu::factor(&local).map_err(|e| Error::Subdomain {
                    subdomain: i,
                    source: Box::new(e),
                })?;
                let owned = idx
                    .iter()
                    .enumerate()
                    .filter(|&(_, &g)| dec.owner[g] == i)
                    .map(|(l, &g)| (l, g))
                    .collect();
                Ok(Subdomain {
                    indices: idx.clone(),
                    owned,
                    factor,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            n: a.rows(),
            subdomains,
        })
    }

    pub fn nparts(&self) -> usize {
        self.subdomains.len()
    }
}

impl LinearOperator for RasPreconditioner {
    fn dim(&self) -> usize {
        self.n
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        let locals: Vec<Vec<f64>> = self
            .subdomains
            .par_iter()
            .map(|s| {
                let mut xl: Vec<f64> = s.indices.iter().map(|&g| x[g]).collect();
                s.factor.solve_in_place(&mut xl);
                xl
            })
            .collect();
        y.iter_mut().for_each(|v| *v = 0.0);
        // owned sets are disjoint, so this is a plain scatter in subdomain order
        for (s, xl) in self.subdomains.iter().zip(&locals) {
            for &(l, g) in &s.owned {
                y[g] += xl[l];
            }
        }
    }
}

pub fn build_ras(a: &SparseMatrix, dec: &Decomposition) -> Result<RasPreconditioner> {
    RasPreconditioner::new(a, dec)
}
