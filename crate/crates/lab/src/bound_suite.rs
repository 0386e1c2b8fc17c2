//! Seeded containment trials for every spectral bound on small synthetic SPD
//! matrices with a known eigendecomposition.

use anyhow::{Context, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use deflation_core::analysis::{
    bound_inexact_a, bound_inexact_c, bound_inexact_d, bound_pa, bound_pc, bound_pd, spectrum_of, BoundKind,
    BoundReport, SpectralSplit, Spectrum,
};
use deflation_core::coarse::{perturb_space, subspace_angle};
use deflation_core::linalg::{orthonormalize, DenseMatrix};
use deflation_core::precond::{PrecondKind, PreconditionedOperator, ProjectionOperator, Side, SolverKind};
use deflation_core::Error as CoreError;

use crate::config::Resolved;
use crate::output::{fmt_f64, Output};

pub const EXACT_KINDS: [BoundKind; 3] = [
    BoundKind::Deflation,
    BoundKind::AdaptedDeflation,
    BoundKind::CoarseCorrection,
];

pub const INEXACT_KINDS: [BoundKind; 3] = [
    BoundKind::InexactDeflation,
    BoundKind::InexactCoarseCorrection,
    BoundKind::InexactAdaptedDeflation,
];

pub fn kind_name(kind: BoundKind) -> &'static str {
    match kind {
        BoundKind::Deflation => "deflation",
        BoundKind::AdaptedDeflation => "adapted-deflation",
        BoundKind::CoarseCorrection => "coarse-correction",
        BoundKind::InexactDeflation => "inexact-deflation",
        BoundKind::InexactCoarseCorrection => "inexact-coarse-correction",
        BoundKind::InexactAdaptedDeflation => "inexact-adapted-deflation",
    }
}

/// A random SPD matrix `Q·diag(λ)·Qᵀ` with `r` small eigenvalues in
/// [1e-3, 1e-1] (log-uniform) and the rest uniform in [1, 10].
pub struct SyntheticSpd {
    pub a: DenseMatrix,
    pub split: SpectralSplit,
    /// Full orthonormal eigenbasis, ascending eigenvalues.
    pub q: DenseMatrix,
}

impl SyntheticSpd {
    pub fn v(&self) -> DenseMatrix {
        self.q.columns_range(0, self.split.r())
    }
}

fn log_uniform<R: Rng + ?Sized>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    (rng.gen_range(lo.ln()..hi.ln())).exp()
}

pub fn synthetic_spd<R: Rng + ?Sized>(rng: &mut R, n: usize, r: usize) -> Result<SyntheticSpd> {
    let mut small: Vec<f64> = (0..r).map(|_| log_uniform(rng, 1e-3, 1e-1)).collect();
    let mut large: Vec<f64> = (0..n - r).map(|_| rng.gen_range(1.0..10.0)).collect();
    small.sort_by(f64::total_cmp);
    large.sort_by(f64::total_cmp);
    let eigenvalues: Vec<f64> = small.into_iter().chain(large).collect();
    let q = orthonormalize(&DenseMatrix::random_uniform(n, n, rng).add(&DenseMatrix::identity(n))?)?;
    anyhow::ensure!(q.dropped == 0, "random basis lost rank");
    let q = q.q;
    let qd = DenseMatrix::from_fn(n, n, |i, j| q[(i, j)] * eigenvalues[j]);
    let full = qd.matmul(&q.transpose())?;
    let a = DenseMatrix::from_fn(n, n, |i, j| 0.5 * (full[(i, j)] + full[(j, i)]));
    let split = SpectralSplit::from_eigenvalues(&eigenvalues, r)?;
    Ok(SyntheticSpd { a, split, q })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TrialStatus {
    Contained,
    Violated,
    /// The realness hypothesis failed; the interval was not enforced.
    HypothesisFailed,
    /// Refused before any spectrum was checked (`cos θ ≈ 0`).
    Rejected,
}

#[derive(Debug, Clone, Serialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub n: usize,
    pub r: usize,
    /// Coarse-space noise scale `ε`, or the relative surrogate perturbation.
    pub perturbation: f64,
    pub status: TrialStatus,
    pub note: Option<String>,
    pub report: Option<BoundReport>,
}

impl TrialRecord {
    fn from_report(trial: usize, n: usize, r: usize, perturbation: f64, report: BoundReport) -> Self {
        let status = if report.is_violation() {
            TrialStatus::Violated
        } else if !report.hypothesis_satisfied {
            TrialStatus::HypothesisFailed
        } else {
            TrialStatus::Contained
        };
        Self {
            trial,
            n,
            r,
            perturbation,
            status,
            note: report.hypothesis_note.clone(),
            report: Some(report),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundSummary {
    pub kind: BoundKind,
    pub trials: usize,
    pub checked: usize,
    pub hypothesis_failed: usize,
    pub rejected: usize,
    pub violations: usize,
    pub max_slack: f64,
    pub max_pairing_deviation: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundBatch {
    pub kind: BoundKind,
    pub records: Vec<TrialRecord>,
}

impl BoundBatch {
    pub fn summary(&self) -> BoundSummary {
        let count = |s: TrialStatus| self.records.iter().filter(|r| r.status == s).count();
        let reports = self.records.iter().filter_map(|r| r.report.as_ref());
        let pairing = reports.clone().filter_map(|r| r.pairing_deviation).reduce(f64::max);
        BoundSummary {
            kind: self.kind,
            trials: self.records.len(),
            checked: count(TrialStatus::Contained) + count(TrialStatus::Violated),
            hypothesis_failed: count(TrialStatus::HypothesisFailed),
            rejected: count(TrialStatus::Rejected),
            violations: count(TrialStatus::Violated),
            max_slack: reports.map(|r| r.slack).fold(0.0, f64::max),
            max_pairing_deviation: pairing,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteResult {
    pub seed: u64,
    pub batches: Vec<BoundBatch>,
    /// One trial per exact-space bound with `Z ⊥ V`.
    pub rejected: Vec<BoundBatch>,
}

impl SuiteResult {
    pub fn batch(&self, kind: BoundKind) -> &BoundBatch {
        self.batches.iter().find(|b| b.kind == kind).expect("every kind is run")
    }

    pub fn violations(&self) -> usize {
        self.batches
            .iter()
            .chain(&self.rejected)
            .map(|b| b.summary().violations)
            .sum()
    }
}

const PERTURBED_SPACE_STREAM: u64 = 1 << 20;
const SURROGATE_STREAM: u64 = 2 << 20;
const REJECTED_STREAM: u64 = 3 << 20;

fn trial_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn shape<R: Rng + ?Sized>(rng: &mut R) -> (usize, usize) {
    (rng.gen_range(20..=40), rng.gen_range(2..=6))
}

fn projected_spectrum(a: &DenseMatrix, proj: &ProjectionOperator, kind: PrecondKind) -> Result<Spectrum> {
    let op = PreconditionedOperator::projected(a, kind, Side::Left, proj)?;
    Ok(spectrum_of(&op)?)
}

/// Perturbed coarse space, exact `E`: checks the three exact-solve bounds.
fn exact_trial(seed: u64, trial: usize) -> Result<[TrialRecord; 3]> {
    let mut rng = trial_rng(seed, PERTURBED_SPACE_STREAM + trial as u64);
    let (n, r) = shape(&mut rng);
    let spd = synthetic_spd(&mut rng, n, r)?;
    let eps = log_uniform(&mut rng, 1e1, 1e4);
    let v = spd.v();
    let z = perturb_space(&v, eps, &mut rng)?.z;
    let angle = subspace_angle(&z, &v)?;
    let proj = ProjectionOperator::new(&spd.a, z, SolverKind::ExactLu)?;
    let pd = projected_spectrum(&spd.a, &proj, PrecondKind::Pd)?;
    let pa = projected_spectrum(&spd.a, &proj, PrecondKind::Pa)?;
    let pc = projected_spectrum(&spd.a, &proj, PrecondKind::Pc)?;
    let e = proj.e();
    Ok([
        TrialRecord::from_report(trial, n, r, eps, bound_pd(&spd.split, e, &angle, &pd)?),
        TrialRecord::from_report(trial, n, r, eps, bound_pa(&spd.split, e, &angle, &pa, Some(&pd))?),
        TrialRecord::from_report(trial, n, r, eps, bound_pc(&spd.split, e, &angle, &pc)?),
    ])
}

/// Exact coarse space, `H = E + δ·λ_max(Λ)·R`: checks the three inexact bounds.
/// `R` is symmetric on even trials and general on odd ones.
fn inexact_trial(seed: u64, trial: usize) -> Result<[TrialRecord; 3]> {
    let mut rng = trial_rng(seed, SURROGATE_STREAM + trial as u64);
    let (n, r) = shape(&mut rng);
    let spd = synthetic_spd(&mut rng, n, r)?;
    let delta = log_uniform(&mut rng, 1e-8, 1e-2);
    let v = spd.v();
    let exact = ProjectionOperator::new(&spd.a, v.clone(), SolverKind::ExactLu)?;
    let noise = DenseMatrix::random_uniform(r, r, &mut rng);
    let noise = if trial % 2 == 0 {
        DenseMatrix::from_fn(r, r, |i, j| 0.5 * (noise[(i, j)] + noise[(j, i)]))
    } else {
        noise
    };
    let noise = noise.scale(delta * spd.split.lambda_max());
    let h = exact.e().add(&noise)?;
    let proj = ProjectionOperator::new(&spd.a, v, SolverKind::Perturbed(h))?;
    let (rho_right, rho_left) = proj.rho_norms();
    let pd = projected_spectrum(&spd.a, &proj, PrecondKind::Pd)?;
    let pc = projected_spectrum(&spd.a, &proj, PrecondKind::Pc)?;
    let pa = projected_spectrum(&spd.a, &proj, PrecondKind::Pa)?;
    Ok([
        TrialRecord::from_report(trial, n, r, delta, bound_inexact_d(&spd.split, rho_right, &pd)?),
        TrialRecord::from_report(trial, n, r, delta, bound_inexact_c(&spd.split, rho_left, &pc)?),
        TrialRecord::from_report(
            trial,
            n,
            r,
            delta,
            bound_inexact_a(&spd.split, rho_right, rho_left, &pa)?,
        ),
    ])
}

/// Coarse space spanned by eigenvectors orthogonal to `V`. Every exact-space
/// bound must refuse it.
fn rejected_trial(seed: u64) -> Result<[TrialRecord; 3]> {
    let mut rng = trial_rng(seed, REJECTED_STREAM);
    let (n, r) = shape(&mut rng);
    let spd = synthetic_spd(&mut rng, n, r)?;
    let v = spd.v();
    let z = spd.q.columns_range(r, 2 * r);
    let angle = subspace_angle(&z, &v)?;
    let proj = ProjectionOperator::new(&spd.a, z, SolverKind::ExactLu)?;
    let pd = projected_spectrum(&spd.a, &proj, PrecondKind::Pd)?;
    let pa = projected_spectrum(&spd.a, &proj, PrecondKind::Pa)?;
    let pc = projected_spectrum(&spd.a, &proj, PrecondKind::Pc)?;
    let e = proj.e();
    let record = |res: deflation_core::Result<BoundReport>| -> Result<TrialRecord> {
        match res {
            Err(CoreError::Hypothesis(note)) => Ok(TrialRecord {
                trial: 0,
                n,
                r,
                perturbation: angle.cos,
                status: TrialStatus::Rejected,
                note: Some(note),
                report: None,
            }),
            Err(e) => Err(e.into()),
            Ok(report) => Ok(TrialRecord::from_report(0, n, r, angle.cos, report)),
        }
    };
    Ok([
        record(bound_pd(&spd.split, e, &angle, &pd))?,
        record(bound_pa(&spd.split, e, &angle, &pa, Some(&pd)))?,
        record(bound_pc(&spd.split, e, &angle, &pc))?,
    ])
}

fn batches(kinds: [BoundKind; 3], trials: Vec<[TrialRecord; 3]>) -> Vec<BoundBatch> {
    let mut out: Vec<BoundBatch> = kinds
        .iter()
        .map(|&kind| BoundBatch { kind, records: Vec::new() })
        .collect();
    for t in trials {
        for (batch, rec) in out.iter_mut().zip(t) {
            batch.records.push(rec);
        }
    }
    out
}

pub fn run_suite(seed: u64, trials: usize) -> Result<SuiteResult> {
    let exact = (0..trials)
        .into_par_iter()
        .map(|t| exact_trial(seed, t).with_context(|| format!("perturbed-space trial {t}")))
        .collect::<Result<Vec<_>>>()?;
    let inexact = (0..trials)
        .into_par_iter()
        .map(|t| inexact_trial(seed, t).with_context(|| format!("surrogate trial {t}")))
        .collect::<Result<Vec<_>>>()?;
    let rejected = rejected_trial(seed).context("orthogonal-space trial")?;
    let mut all = batches(EXACT_KINDS, exact);
    all.extend(batches(INEXACT_KINDS, inexact));
    Ok(SuiteResult {
        seed,
        batches: all,
        rejected: batches(EXACT_KINDS, vec![rejected]),
    })
}

const SUMMARY_HEADER: [&str; 9] = [
    "bound",
    "trials",
    "checked",
    "hypothesis_failed",
    "rejected",
    "violations",
    "max_slack",
    "max_pairing_deviation",
    "orthogonal_space",
];

pub fn run_experiment(cfg: &Resolved, out: &Output) -> Result<SuiteResult> {
    let result = run_suite(cfg.seed, cfg.trials)?;
    let mut rows = Vec::new();
    for (batch, rejected) in result.batches.iter().zip(result.rejected.iter().map(Some).chain(std::iter::repeat(None))) {
        out.write_json(&format!("bounds_{}.json", kind_name(batch.kind)), batch)?;
        let s = batch.summary();
        let orthogonal = match rejected.map(|b| b.records[0].status) {
            Some(TrialStatus::Rejected) => "rejected".to_string(),
            Some(_) => "accepted".to_string(),
            None => "n/a".to_string(),
        };
        rows.push(vec![
            kind_name(batch.kind).to_string(),
            s.trials.to_string(),
            s.checked.to_string(),
            s.hypothesis_failed.to_string(),
            s.rejected.to_string(),
            s.violations.to_string(),
            fmt_f64(s.max_slack),
            s.max_pairing_deviation.map_or("none".into(), fmt_f64),
            orthogonal,
        ]);
    }
    out.write_json("bounds_orthogonal_space.json", &result.rejected)?;
    out.write_csv("summary.csv", &SUMMARY_HEADER, &rows)?;
    Ok(result)
}
