use std::path::{Path, PathBuf};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::krylov::RitzPair;
use crate::linalg::io::{read_dense_csv, write_dense_csv};
use crate::linalg::{orthonormalize, sym_eig, DenseMatrix};
use crate::pde::Decomposition;
use crate::precond::ORTHONORMAL_TOL;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Provenance {
    ExactEigenvectors,
    Perturbed { eps: f64 },
    RitzSplit { nparts: usize, r: usize },
    Imported,
}

/// Orthonormal coarse basis `Z` with its origin.
#[derive(Debug, Clone, PartialEq)]
pub struct CoarseSpace {
    pub z: DenseMatrix,
    pub provenance: Provenance,
    /// Columns lost to rank deficiency during construction.
    pub dropped: usize,
    /// Subdomain of each column for block-structured spaces.
    pub groups: Option<Vec<usize>>,
}

#[derive(Serialize, Deserialize)]
struct Sidecar {
    provenance: Provenance,
    rows: usize,
    cols: usize,
    dropped: usize,
    groups: Option<Vec<usize>>,
}

impl CoarseSpace {
    pub fn new(z: DenseMatrix, provenance: Provenance) -> Result<Self> {
        let deviation = z.orthonormality_defect();
        if deviation > ORTHONORMAL_TOL {
            return Err(Error::NotOrthonormal { deviation });
        }
        Ok(Self {
            z,
            provenance,
            dropped: 0,
            groups: None,
        })
    }

    pub fn dim(&self) -> usize {
        self.z.rows()
    }

    pub fn rank(&self) -> usize {
        self.z.cols()
    }
}

/// Eigenvectors of the `r` smallest eigenvalues of symmetric `a`, ascending.
/// Diagonal matrices take unit vectors directly.
pub fn exact_coarse_space(a: &DenseMatrix, r: usize) -> Result<CoarseSpace> {
    let n = a.rows();
    if r == 0 || r >= n {
        return Err(Error::Invalid(format!("coarse dimension {r} must lie in 1..{n}")));
    }
    let is_diagonal = a.is_square() && (0..n).all(|j| (0..n).all(|i| i == j || a[(i, j)] == 0.0));
    let z = if is_diagonal {
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| a[(i, i)].total_cmp(&a[(j, j)]));
        DenseMatrix::from_fn(n, r, |i, j| if i == order[j] { 1.0 } else { 0.0 })
    } else {
        sym_eig(a)?.eigenvectors.columns_range(0, r)
    };
    CoarseSpace::new(z, Provenance::ExactEigenvectors)
}

/// `orthonormalize(V + R/ε)` with `R` uniform on [0, 1).
pub fn perturb_space<R: Rng + ?Sized>(v: &DenseMatrix, eps: f64, rng: &mut R) -> Result<CoarseSpace> {
    if !(eps > 0.0) {
        return Err(Error::Invalid(format!("perturbation scale must be positive, got {eps}")));
    }
    let noise = DenseMatrix::random_uniform(v.rows(), v.cols(), rng);
    let perturbed = v.add(&noise.scale(1.0 / eps))?;
    let q = orthonormalize(&perturbed)?;
    if q.dropped > 0 {
        return Err(Error::EmptyBasis { dropped: q.dropped });
    }
    CoarseSpace::new(q.q, Provenance::Perturbed { eps })
}

/// Largest recomputed residual over `pairs`.
pub fn res_max(pairs: &[RitzPair]) -> Result<f64> {
    if pairs.is_empty() {
        return Err(Error::Invalid("res_max of an empty pair list".into()));
    }
    Ok(pairs.iter().fold(0.0f64, |m, p| m.max(p.residual)))
}

/// Block-diagonal basis: the rows of `vectors` owned by each subdomain are
/// orthonormalized separately and zero-padded. Null blocks are dropped.
pub fn ritz_split(vectors: &DenseMatrix, dec: &Decomposition) -> Result<CoarseSpace> {
    if vectors.rows() != dec.n {
        return Err(Error::Dimension(format!(
            "{} rows for a decomposition of {} unknowns",
            vectors.rows(),
            dec.n
        )));
    }
    if vectors.cols() == 0 {
        return Err(Error::Invalid("no vectors to split".into()));
    }
    let mut columns: Vec<Vec<f64>> = Vec::new();
    let mut groups = Vec::new();
    let mut dropped = 0;
    for (part, owned) in dec.owned.iter().enumerate() {
        if owned.is_empty() {
            return Err(Error::Invalid(format!("subdomain {part} owns no rows")));
        }
        let block = vectors.select_rows(owned);
        match orthonormalize(&block) {
            Ok(q) => {
                dropped += q.dropped;
                for col in q.q.columns() {
                    let mut full = vec![0.0; dec.n];
                    for (&g, &val) in owned.iter().zip(col) {
                        full[g] = val;
                    }
                    columns.push(full);
                    groups.push(part);
                }
            }
            Err(Error::EmptyBasis { dropped: d }) => dropped += d,
            Err(e) => return Err(e),
        }
    }
    if columns.is_empty() {
        return Err(Error::EmptyBasis { dropped });
    }
    let mut cs = CoarseSpace::new(
        DenseMatrix::from_columns(dec.n, &columns)?,
        Provenance::RitzSplit {
            nparts: dec.nparts,
            r: vectors.cols(),
        },
    )?;
    cs.dropped = dropped;
    cs.groups = Some(groups);
    Ok(cs)
}

fn sidecar_path(csv: &Path) -> PathBuf {
    let mut s = csv.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

/// Writes `Z` as dense CSV and the metadata to `<path>.json`.
pub fn write_coarse_space(cs: &CoarseSpace, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    write_dense_csv(&cs.z, path)?;
    let meta = Sidecar {
        provenance: cs.provenance.clone(),
        rows: cs.z.rows(),
        cols: cs.z.cols(),
        dropped: cs.dropped,
        groups: cs.groups.clone(),
    };
    std::fs::write(sidecar_path(path), serde_json::to_string_pretty(&meta)? + "\n")?;
    Ok(())
}

/// Reads a coarse basis CSV; the JSON sidecar is optional.
pub fn read_coarse_space(path: impl AsRef<Path>) -> Result<CoarseSpace> {
    let path = path.as_ref();
    let z = read_dense_csv(path)?;
    let side = sidecar_path(path);
    if side.exists() {
        let meta: Sidecar = serde_json::from_str(&std::fs::read_to_string(side)?)?;
        if meta.rows != z.rows() || meta.cols != z.cols() {
            return Err(Error::Dimension(format!(
                "sidecar declares {}x{}, CSV holds {}x{}",
                meta.rows,
                meta.cols,
                z.rows(),
                z.cols()
            )));
        }
        let mut cs = CoarseSpace::new(z, meta.provenance)?;
        cs.dropped = meta.dropped;
        cs.groups = meta.groups;
        Ok(cs)
    } else {
        CoarseSpace::new(z, Provenance::Imported)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn diagonal_exact_space() {
        let a = DenseMatrix::from_diag(&[3.0, 1.0, 2.0]);
        let cs = exact_coarse_space(&a, 1).unwrap();
        assert_eq!(cs.z.col(0), &[0.0, 1.0, 0.0]);
        assert!(exact_coarse_space(&a, 3).is_err());
    }

    #[test]
    fn tiny_perturbation_keeps_space() {
        let v = DenseMatrix::identity_columns(20, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let cs = perturb_space(&v, 1e15, &mut rng).unwrap();
        let a = crate::coarse::subspace_angle(&cs.z, &v).unwrap();
        assert!(a.sin < 1e-12);
    }

    #[test]
    fn split_drops_null_blocks() {
        let dec = Decomposition::from_owner(vec![0, 0, 1, 1], 2).unwrap();
        let v = DenseMatrix::from_col_major(4, 1, vec![0.6, 0.8, 0.0, 0.0]).unwrap();
        let cs = ritz_split(&v, &dec).unwrap();
        assert_eq!(cs.rank(), 1);
        assert_eq!(cs.dropped, 1);
        assert_eq!(cs.groups, Some(vec![0]));
    }

    #[test]
    fn empty_res_max_rejected() {
        assert!(res_max(&[]).is_err());
    }

    #[test]
    fn roundtrip_with_sidecar() {
        let dir = std::env::temp_dir().join(format!("coarse-rt-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("z.csv");
        let dec = Decomposition::from_owner(vec![0, 1, 1], 2).unwrap();
        let v = DenseMatrix::from_col_major(3, 1, vec![1.0, 2.0, 3.0]).unwrap();
        let cs = ritz_split(&v, &dec).unwrap();
        write_coarse_space(&cs, &path).unwrap();
        assert_eq!(read_coarse_space(&path).unwrap(), cs);
        std::fs::remove_dir_all(dir).unwrap();
    }
}
