//! Dispatch from an experiment id to its driver.

use std::path::Path;

use anyhow::{bail, Context, Result};

use deflation_core::analysis::{spectrum_of_capped, Spectrum, DEFAULT_SPECTRUM_CAP};
use deflation_core::coarse::read_coarse_space;
use deflation_core::linalg::read_matrix_market;
use deflation_core::precond::{PrecondKind, PreconditionedOperator, ProjectionOperator, Side, SolverKind};

use crate::bvp::CoarseSolve;
use crate::config::{ExperimentId, Resolved};
use crate::output::Output;
use crate::{bound_suite, bvp, diag};

/// What a run reports back beyond its files.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RunOutcome {
    /// Bound violations on hypothesis-satisfying trials; zero for other experiments.
    pub violations: usize,
}

pub fn run_experiment(cfg: &Resolved, dir: impl AsRef<Path>) -> Result<RunOutcome> {
    let out = Output::create(dir, cfg.seed)?;
    let mut outcome = RunOutcome::default();
    match cfg.experiment {
        ExperimentId::DiagTable1 => diag::run_table1(cfg, &out)?,
        ExperimentId::DiagTable2 => diag::run_table2(cfg, &out)?,
        ExperimentId::DiagTable3 => diag::run_table3(cfg, &out)?,
        ExperimentId::DiagSpectra => diag::run_spectra(cfg, &out)?,
        ExperimentId::BvpConvergence => {
            bvp::write_decompositions(cfg, &out)?;
            bvp::run_experiment(cfg, &out, &[CoarseSolve::Exact])?;
        }
        ExperimentId::BvpIlu => {
            bvp::run_experiment(cfg, &out, &[CoarseSolve::Ilu0])?;
        }
        ExperimentId::BoundSuite => {
            outcome.violations = bound_suite::run_experiment(cfg, &out)?.violations();
        }
    }
    out.write_json("config.json", cfg)?;
    Ok(outcome)
}

pub fn parse_precond(s: &str) -> Result<PrecondKind> {
    Ok(match s {
        "pd" => PrecondKind::Pd,
        "pc" => PrecondKind::Pc,
        "pa" => PrecondKind::Pa,
        "none" => PrecondKind::None,
        other => bail!("unknown preconditioner '{other}'; expected pd, pc, pa or none"),
    })
}

/// Dense spectrum of `P·A` for a Matrix Market `A` and a coarse basis CSV,
/// with `E = ZᵀAZ` solved exactly.
pub fn matrix_spectrum(
    matrix: impl AsRef<Path>,
    kind: PrecondKind,
    coarse: Option<&Path>,
    cap: Option<usize>,
) -> Result<Spectrum> {
    let matrix = matrix.as_ref();
    let a = read_matrix_market(matrix).with_context(|| format!("reading {}", matrix.display()))?;
    let cap = cap.unwrap_or(DEFAULT_SPECTRUM_CAP);
    if kind == PrecondKind::None {
        return Ok(spectrum_of_capped(&PreconditionedOperator::unpreconditioned(&a), cap)?);
    }
    let Some(coarse) = coarse else {
        bail!("--coarse is required for {}", kind.label());
    };
    if kind == PrecondKind::Ras {
        bail!("RAS needs a decomposition; use pd, pc, pa or none");
    }
    let cs = read_coarse_space(coarse).with_context(|| format!("reading {}", coarse.display()))?;
    let proj = ProjectionOperator::new(&a, cs.z, SolverKind::ExactLu)?;
    let op = PreconditionedOperator::projected(&a, kind, Side::Left, &proj)?;
    Ok(spectrum_of_capped(&op, cap)?)
}
