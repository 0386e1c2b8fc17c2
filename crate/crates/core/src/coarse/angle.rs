use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{complete_basis, singular_values, DenseMatrix};
use crate::precond::ORTHONORMAL_TOL;

/// Largest order for which [`subspace_angle`] also builds the orthogonal
/// complements and evaluates the complement-based formulas.
pub const EXPLICIT_ANGLE_MAX_N: usize = 500;

const COMPLETION_SEED: u64 = 0xa11e;

/// Complement-based evaluations of the same angle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AngleCrossCheck {
    /// `σ_max(Zᵀ V⊥)`
    pub sin_z_vperp: f64,
    /// `σ_max(Vᵀ Z⊥)`
    pub sin_v_zperp: f64,
    /// `σ_min(Z⊥ᵀ V⊥)`
    pub cos_zperp_vperp: f64,
}

/// Largest principal angle between two equal-dimension subspaces.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SubspaceAngle {
    pub sin: f64,
    pub cos: f64,
    /// Subspace distance; equals `sin`.
    pub dist: f64,
    pub cross_check: Option<AngleCrossCheck>,
}

impl SubspaceAngle {
    pub fn tan(&self) -> f64 {
        self.sin / self.cos
    }

    /// Largest disagreement among the available formulas for the same quantity.
    pub fn formula_disagreement(&self) -> f64 {
        self.cross_check.map_or(0.0, |c| {
            (c.sin_z_vperp - self.sin)
                .abs()
                .max((c.sin_v_zperp - self.sin).abs())
                .max((c.sin_z_vperp - c.sin_v_zperp).abs())
                .max((c.cos_zperp_vperp - self.cos).abs())
        })
    }
}

fn check_pair(z: &DenseMatrix, v: &DenseMatrix) -> Result<()> {
    if z.rows() != v.rows() || z.cols() != v.cols() {
        return Err(Error::Dimension(format!(
            "angle between {}x{} and {}x{} bases",
            z.rows(),
            z.cols(),
            v.rows(),
            v.cols()
        )));
    }
    if z.cols() == 0 || z.cols() > z.rows() {
        return Err(Error::Dimension(format!("{} columns in dimension {}", z.cols(), z.rows())));
    }
    for m in [z, v] {
        let deviation = m.orthonormality_defect();
        if deviation > ORTHONORMAL_TOL {
            return Err(Error::NotOrthonormal { deviation });
        }
    }
    Ok(())
}

fn sigma_max(m: &DenseMatrix) -> f64 {
    singular_values(m).first().copied().unwrap_or(0.0)
}

fn sigma_min(m: &DenseMatrix) -> f64 {
    singular_values(m).last().copied().unwrap_or(0.0)
}

fn primary(z: &DenseMatrix, v: &DenseMatrix) -> Result<(f64, f64)> {
    let ztv = z.tr_matmul(v)?;
    let cos = sigma_min(&ztv).min(1.0);
    // (I − V Vᵀ) Z has the singular values of V⊥ᵀ Z
    let residual = z.sub(&v.matmul(&v.tr_matmul(z)?)?)?;
    let sin = sigma_max(&residual).min(1.0);
    Ok((sin, cos))
}

fn cross_check(z: &DenseMatrix, v: &DenseMatrix) -> Result<Option<AngleCrossCheck>> {
    if z.cols() == z.rows() {
        return Ok(None);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(COMPLETION_SEED);
    let v_perp = complete_basis(v, &mut rng)?;
    let z_perp = complete_basis(z, &mut rng)?;
    Ok(Some(AngleCrossCheck {
        sin_z_vperp: sigma_max(&z.tr_matmul(&v_perp)?),
        sin_v_zperp: sigma_max(&v.tr_matmul(&z_perp)?),
        cos_zperp_vperp: sigma_min(&z_perp.tr_matmul(&v_perp)?),
    }))
}

/// Angle between span(`z`) and span(`v`). Cross-checks through explicit
/// complements are included when `n ≤ EXPLICIT_ANGLE_MAX_N`.
pub fn subspace_angle(z: &DenseMatrix, v: &DenseMatrix) -> Result<SubspaceAngle> {
    check_pair(z, v)?;
    let (sin, cos) = primary(z, v)?;
    let cross_check = if z.rows() <= EXPLICIT_ANGLE_MAX_N {
        cross_check(z, v)?
    } else {
        None
    };
    Ok(SubspaceAngle {
        sin,
        cos,
        dist: sin,
        cross_check,
    })
}

/// [`subspace_angle`] with the complement cross-checks at any size.
pub fn subspace_angle_explicit(z: &DenseMatrix, v: &DenseMatrix) -> Result<SubspaceAngle> {
    check_pair(z, v)?;
    let (sin, cos) = primary(z, v)?;
    Ok(SubspaceAngle {
        sin,
        cos,
        dist: sin,
        cross_check: cross_check(z, v)?,
    })
}
