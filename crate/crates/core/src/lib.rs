//! Deflation, coarse-correction and adapted-deflation preconditioners for
//! SPD systems, with executable spectral bounds for perturbed coarse spaces
//! and inexact projection-matrix solves.

pub mod analysis;
pub mod coarse;
pub mod error;
pub mod krylov;
pub mod linalg;
pub mod pde;
pub mod precond;

pub use error::{Error, Result};
