//! The heterogeneous diffusion test problem on the unit square: κ fields,
//! the five-point finite-volume assembly, and rectangular overlapping
//! decompositions.

pub mod assemble;
pub mod decomposition;
pub mod kappa;

pub use assemble::{assemble, Grid2D};
pub use decomposition::{add_overlap, partition, tiling_for, Decomposition};
pub use kappa::{kappa_continuous, kappa_skyscraper, KappaField};
