//! The projection matrix `E = ZᵀBZ`, the deflation / coarse-correction /
//! adapted-deflation preconditioners built on it, and one-level RAS.

pub mod operator;
pub mod projection;
pub mod ras;

pub use operator::{apply_pa, apply_pc, apply_pd, PrecondKind, PreconditionedOperator, Side};
pub use projection::{build_projection, ProjectionOperator, SolverKind, ORTHONORMAL_TOL};
pub use ras::{build_ras, RasPreconditioner};
