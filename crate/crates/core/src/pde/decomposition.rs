use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::SparseMatrix;
use crate::pde::assemble::Grid2D;

/// Non-overlapping ownership plus overlapping index sets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Decomposition {
    pub n: usize,
    pub nparts: usize,
    /// Rounds of neighbor addition applied to the owned sets.
    pub overlap: usize,
    /// `owner[g]` is the subdomain owning unknown `g`.
    pub owner: Vec<usize>,
    /// Sorted owned indices per subdomain.
    pub owned: Vec<Vec<usize>>,
    /// Sorted overlapping indices per subdomain; each ⊇ the owned set.
    pub overlapping: Vec<Vec<usize>>,
}

impl Decomposition {
    /// Builds a decomposition with no overlap from an ownership map.
    pub fn from_owner(owner: Vec<usize>, nparts: usize) -> Result<Self> {
        let n = owner.len();
        let mut owned = vec![Vec::new(); nparts];
        for (g, &p) in owner.iter().enumerate() {
            if p >= nparts {
                return Err(Error::Invalid(format!("unknown {g} owned by part {p} >= {nparts}")));
            }
            owned[p].push(g);
        }
        let dec = Self {
            n,
            nparts,
            overlap: 0,
            owner,
            overlapping: owned.clone(),
            owned,
        };
        dec.validate()?;
        Ok(dec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.owner.len() != self.n || self.owned.len() != self.nparts || self.overlapping.len() != self.nparts {
            return Err(Error::Invalid("decomposition arrays have inconsistent sizes".into()));
        }
        let mut covered = vec![false; self.n];
        for (p, set) in self.owned.iter().enumerate() {
            if set.is_empty() {
                return Err(Error::Invalid(format!("subdomain {p} owns no unknowns")));
            }
            for &g in set {
                if self.owner[g] != p || covered[g] {
                    return Err(Error::Invalid(format!("unknown {g} is not owned exactly once")));
                }
                covered[g] = true;
            }
        }
        if let Some(g) = covered.iter().position(|c| !c) {
            return Err(Error::Invalid(format!("unknown {g} is not owned")));
        }
        for (p, (ov, own)) in self.overlapping.iter().zip(&self.owned).enumerate() {
            if ov.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::Invalid(format!("overlapping set {p} is not sorted")));
            }
            if own.iter().any(|g| ov.binary_search(g).is_err()) {
                return Err(Error::Invalid(format!(
                    "overlapping set {p} does not contain its owned set"
                )));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// The `px × py` tiling used for `nparts`: the most nearly square factor
/// pair with `px ≥ py` that fits the grid.
pub fn tiling_for(grid: &Grid2D, nparts: usize) -> Result<(usize, usize)> {
    if nparts == 0 {
        return Err(Error::Invalid("nparts must be positive".into()));
    }
    let pairs: Vec<(usize, usize)> = (1..=nparts)
        .filter(|d| nparts % d == 0)
        .map(|py| (nparts / py, py))
        .collect();
    pairs
        .iter()
        .copied()
        .filter(|&(px, py)| px >= py && px <= grid.nx && py <= grid.ny)
        .min_by_key(|&(px, py)| px - py)
        .or_else(|| {
            pairs
                .iter()
                .copied()
                .filter(|&(px, py)| px <= grid.nx && py <= grid.ny)
                .min_by_key(|&(px, py)| px.abs_diff(py))
        })
        .ok_or_else(|| {
            let listed: Vec<String> = pairs.iter().map(|(a, b)| format!("{a}x{b}")).collect();
            Error::Invalid(format!(
                "{nparts} parts cannot tile a {}x{} grid; factorizations: {}",
                grid.nx,
                grid.ny,
                listed.join(", ")
            ))
        })
}

fn balanced_bounds(len: usize, parts: usize) -> Vec<usize> {
    (0..=parts).map(|k| k * len / parts).collect()
}

/// Rectangular tiles, as balanced as divisibility allows.
pub fn partition(grid: &Grid2D, nparts: usize) -> Result<Decomposition> {
    let (px, py) = tiling_for(grid, nparts)?;
    let bx = balanced_bounds(grid.nx, px);
    let by = balanced_bounds(grid.ny, py);
    let mut owner = vec![0usize; grid.len()];
    for ty in 0..py {
        for tx in 0..px {
            let part = ty * px + tx;
            for j in by[ty]..by[ty + 1] {
                for i in bx[tx]..bx[tx + 1] {
                    owner[grid.index(i, j)] = part;
                }
            }
        }
    }
    Decomposition::from_owner(owner, nparts)
}

/// Grows every overlapping set by `levels` rounds of adding all neighbors
/// in the graph of `adjacency`.
pub fn add_overlap(dec: &Decomposition, levels: usize, adjacency: &SparseMatrix) -> Result<Decomposition> {
    if adjacency.rows() != dec.n || adjacency.cols() != dec.n {
        return Err(Error::Dimension(format!(
            "adjacency of order {} for {} unknowns",
            adjacency.rows(),
            dec.n
        )));
    }
    let overlapping = dec
        .overlapping
        .iter()
        .map(|set| {
            let mut current: BTreeSet<usize> = set.iter().copied().collect();
            let mut frontier: Vec<usize> = set.clone();
            for _ in 0..levels {
                let mut next = Vec::new();
                for &g in &frontier {
                    for (k, _) in adjacency.row(g) {
                        if current.insert(k) {
                            next.push(k);
                        }
                    }
                }
                frontier = next;
            }
            current.into_iter().collect()
        })
        .collect();
    let out = Decomposition {
        overlap: dec.overlap + levels,
        overlapping,
        ..dec.clone()
    };
    out.validate()?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pde::{assemble, KappaField};

    #[test]
    fn default_tilings() {
        let g = Grid2D::square(101).unwrap();
        assert_eq!(tiling_for(&g, 16).unwrap(), (4, 4));
        assert_eq!(tiling_for(&g, 32).unwrap(), (8, 4));
        assert_eq!(tiling_for(&g, 64).unwrap(), (8, 8));
        assert_eq!(tiling_for(&g, 128).unwrap(), (16, 8));
        assert_eq!(tiling_for(&g, 1).unwrap(), (1, 1));
    }

    #[test]
    fn untileable_lists_factorizations() {
        let g = Grid2D::square(3).unwrap();
        let err = tiling_for(&g, 7).unwrap_err().to_string();
        assert!(err.contains("7x1"), "{err}");
    }

    #[test]
    fn single_domain_overlap_is_noop() {
        let g = Grid2D::square(5).unwrap();
        let (a, _) = assemble(&g, &KappaField::Constant(1.0)).unwrap();
        let d = partition(&g, 1).unwrap();
        let o = add_overlap(&d, 2, &a).unwrap();
        assert_eq!(o.overlapping[0], (0..25).collect::<Vec<_>>());
    }

    #[test]
    fn interior_tiles_grow() {
        let g = Grid2D::square(101).unwrap();
        let (a, _) = assemble(&g, &KappaField::Constant(1.0)).unwrap();
        let d = add_overlap(&partition(&g, 16).unwrap(), 2, &a).unwrap();
        for p in 0..16 {
            assert!(d.overlapping[p].len() > d.owned[p].len());
        }
        let total: usize = d.owned.iter().map(Vec::len).sum();
        assert_eq!(total, 10201);
    }
}
