//! Predicted eigenvalue intervals for the projection preconditioners and
//! their comparison with computed spectra.

mod bounds;
mod spectrum;

pub use bounds::{
    bound_inexact_a, bound_inexact_c, bound_inexact_d, bound_pa, bound_pc, bound_pd, e_norms, eps_c, eps_d, eta_d,
    xi_a, xi_c, xi_d, BoundKind, BoundReport, Cluster, ClusterKind, CLUSTER_REL_TOL, CONTAINMENT_REL_SLACK,
    PAIRING_TOL,
};
pub use spectrum::{
    spectrum_csv_string, spectrum_of, spectrum_of_capped, spectrum_of_dense, SpectralSplit, Spectrum,
    DEFAULT_SPECTRUM_CAP, REALNESS_REL_TOL,
};
