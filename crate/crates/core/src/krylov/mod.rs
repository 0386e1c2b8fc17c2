//! Full GMRES and Ritz-pair extraction.

mod gmres;
mod ritz;

pub use gmres::{gmres, history_csv_string, write_history_csv, ArnoldiBasis, GmresConfig, GmresResult};
pub use ritz::{extract_ritz, rayleigh_ritz, RitzPair, RitzReport};
