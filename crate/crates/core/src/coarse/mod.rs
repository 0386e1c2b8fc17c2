//! Coarse-space construction and quality metrics.

mod angle;
mod space;

pub use angle::{subspace_angle, subspace_angle_explicit, AngleCrossCheck, SubspaceAngle, EXPLICIT_ANGLE_MAX_N};
pub use space::{
    exact_coarse_space, perturb_space, read_coarse_space, res_max, ritz_split, write_coarse_space, CoarseSpace,
    Provenance,
};
