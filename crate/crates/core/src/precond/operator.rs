//! Matrix-free composition of a base operator with one of the preconditioners.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::LinearOperator;
use crate::precond::projection::ProjectionOperator;
use crate::precond::ras::RasPreconditioner;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PrecondKind {
    None,
    /// `P_D = I − B Z E⁻¹ Zᵀ`.
    Pd,
    /// `P_C = I + Z E⁻¹ Zᵀ`.
    Pc,
    /// `P_A = I − B Z E⁻¹ Zᵀ + Z E⁻¹ Zᵀ`.
    Pa,
    Ras,
}

impl PrecondKind {
    pub fn label(self) -> &'static str {
        match self {
            PrecondKind::None => "none",
            PrecondKind::Pd => "P_D",
            PrecondKind::Pc => "P_C",
            PrecondKind::Pa => "P_A",
            PrecondKind::Ras => "RAS",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    /// `P·B`
    Left,
    /// `B·P`
    Right,
}

/// `P_D x`, using the cached `B Z`.
pub fn apply_pd(p: &ProjectionOperator, x: &[f64]) -> Vec<f64> {
    let c = p.coarse_coefficients(x);
    let mut y = x.to_vec();
    p.add_operator_z(&c, -1.0, &mut y);
    y
}

/// `P_C x`.
pub fn apply_pc(p: &ProjectionOperator, x: &[f64]) -> Vec<f64> {
    let c = p.coarse_coefficients(x);
    let mut y = x.to_vec();
    p.add_z(&c, 1.0, &mut y);
    y
}

/// `P_A x`.
pub fn apply_pa(p: &ProjectionOperator, x: &[f64]) -> Vec<f64> {
    let c = p.coarse_coefficients(x);
    let mut y = x.to_vec();
    p.add_operator_z(&c, -1.0, &mut y);
    p.add_z(&c, 1.0, &mut y);
    y
}

/// `P·B` or `B·P` for a base operator `B` and one preconditioner `P`.
pub struct PreconditionedOperator<'a> {
    base: &'a dyn LinearOperator,
    kind: PrecondKind,
    side: Side,
    projection: Option<&'a ProjectionOperator>,
    ras: Option<&'a RasPreconditioner>,
}

impl<'a> PreconditionedOperator<'a> {
    pub fn unpreconditioned(base: &'a dyn LinearOperator) -> Self {
        Self {
            base,
            kind: PrecondKind::None,
            side: Side::Left,
            projection: None,
            ras: None,
        }
    }

    /// One of `P_D`, `P_C`, `P_A` built on `projection`, whose cached `B·Z`
    /// must come from this same `base`.
    pub fn projected(
        base: &'a dyn LinearOperator,
        kind: PrecondKind,
        side: Side,
        projection: &'a ProjectionOperator,
    ) -> Result<Self> {
        if !matches!(kind, PrecondKind::Pd | PrecondKind::Pc | PrecondKind::Pa) {
            return Err(Error::Invalid(format!(
                "{} is not a projection-based preconditioner",
                kind.label()
            )));
        }
        if projection.dim() != base.dim() {
            return Err(Error::Dimension(format!(
                "projection of order {} on operator of order {}",
                projection.dim(),
                base.dim()
            )));
        }
        Ok(Self {
            base,
            kind,
            side,
            projection: Some(projection),
            ras: None,
        })
    }

    pub fn ras(base: &'a dyn LinearOperator, side: Side, ras: &'a RasPreconditioner) -> Result<Self> {
        if ras.dim() != base.dim() {
            return Err(Error::Dimension(format!(
                "RAS of order {} on operator of order {}",
                ras.dim(),
                base.dim()
            )));
        }
        Ok(Self {
            base,
            kind: PrecondKind::Ras,
            side,
            projection: None,
            ras: Some(ras),
        })
    }

    pub fn kind(&self) -> PrecondKind {
        self.kind
    }

    pub fn side(&self) -> Side {
        self.side
    }

    /// `P x` alone, e.g. to precondition a right-hand side.
    pub fn precondition(&self, x: &[f64]) -> Vec<f64> {
        match self.kind {
            PrecondKind::None => x.to_vec(),
            PrecondKind::Pd => apply_pd(self.projection.unwrap(), x),
            PrecondKind::Pc => apply_pc(self.projection.unwrap(), x),
            PrecondKind::Pa => apply_pa(self.projection.unwrap(), x),
            PrecondKind::Ras => self.ras.unwrap().apply_vec(x),
        }
    }
}

impl LinearOperator for PreconditionedOperator<'_> {
    fn dim(&self) -> usize {
        self.base.dim()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        match self.side {
            Side::Left => {
                let bx = self.base.apply_vec(x);
                y.copy_from_slice(&self.precondition(&bx));
            }
            Side::Right => {
                let px = self.precondition(x);
                self.base.apply(&px, y);
            }
        }
    }
}
