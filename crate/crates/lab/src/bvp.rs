//! Two-level experiments on the heterogeneous diffusion problem: RAS as the
//! first level, a Ritz-split coarse space as the second.

use anyhow::{Context, Result};
use rayon::prelude::*;
use serde::Serialize;

use deflation_core::coarse::{res_max, ritz_split};
use deflation_core::krylov::{extract_ritz, gmres, GmresConfig, GmresResult};
use deflation_core::linalg::norm2;
use deflation_core::pde::{add_overlap, assemble, partition, Decomposition, Grid2D, KappaField};
use deflation_core::precond::{
    PrecondKind, PreconditionedOperator, ProjectionOperator, RasPreconditioner, Side, SolverKind,
};

use crate::config::Resolved;
use crate::diag::KINDS;
use crate::output::{fmt_f64, Count, Output};

/// How `E` is inverted in the second level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CoarseSolve {
    Exact,
    Ilu0,
}

impl CoarseSolve {
    pub fn name(self) -> &'static str {
        match self {
            CoarseSolve::Exact => "exact",
            CoarseSolve::Ilu0 => "ilu0",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct MethodRun {
    pub kind: PrecondKind,
    pub count: Count,
    pub final_residual: f64,
    /// Final residual relative to this run's own preconditioned right-hand side.
    pub final_residual_own: f64,
    pub history: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct TwoLevel {
    pub solve: CoarseSolve,
    pub coarse_dim: usize,
    pub dropped: usize,
    /// `‖E S⁻¹ − I‖₂` for the surrogate `S` actually inverted.
    pub rho_right: f64,
    /// `‖S⁻¹ E − I‖₂`
    pub rho_left: f64,
    pub e_asymmetry: f64,
    pub runs: Vec<MethodRun>,
}

impl TwoLevel {
    pub fn run(&self, kind: PrecondKind) -> &MethodRun {
        self.runs.iter().find(|r| r.kind == kind).expect("all kinds run")
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RitzSummary {
    pub values: Vec<f64>,
    pub residuals: Vec<f64>,
    pub complex_excluded: usize,
    pub res_max: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CaseResult {
    pub kappa: KappaField,
    pub nparts: usize,
    pub n: usize,
    pub one_level: MethodRun,
    pub ritz: RitzSummary,
    /// Empty when no Ritz value fell below the threshold.
    pub two_level: Vec<TwoLevel>,
}

/// `scale` converts the reference-norm residual to one relative to the
/// run's own preconditioned right-hand side.
fn method_run(kind: PrecondKind, r: &GmresResult, scale: f64) -> MethodRun {
    MethodRun {
        kind,
        count: Count::from_result(r),
        final_residual: r.final_residual(),
        final_residual_own: r.final_residual() * scale,
        history: r.history.clone(),
    }
}

pub struct Problem {
    pub grid: Grid2D,
    pub a: deflation_core::linalg::SparseMatrix,
    pub b: Vec<f64>,
    pub dec: Decomposition,
    pub ras: RasPreconditioner,
}

pub fn build_problem(grid_n: usize, kappa: KappaField, nparts: usize, overlap: usize) -> Result<Problem> {
    let grid = Grid2D::square(grid_n)?;
    let (a, b) = assemble(&grid, &kappa)?;
    let dec = add_overlap(&partition(&grid, nparts)?, overlap, &a)?;
    let ras = RasPreconditioner::new(&a, &dec)?;
    Ok(Problem { grid, a, b, dec, ras })
}

/// One-level solve, Ritz harvest, then the two-level solves for each
/// requested coarse solver. All residuals are relative to `‖M⁻¹ b‖`.
pub fn run_case(
    grid_n: usize,
    kappa: KappaField,
    nparts: usize,
    overlap: usize,
    threshold: f64,
    gcfg: &GmresConfig,
    solves: &[CoarseSolve],
) -> Result<CaseResult> {
    let p = build_problem(grid_n, kappa, nparts, overlap)
        .with_context(|| format!("building {} problem with {nparts} parts", kappa.name()))?;
    let one = PreconditionedOperator::ras(&p.a, Side::Left, &p.ras)?;
    let rhs = one.precondition(&p.b);
    let rhs_norm = norm2(&rhs);
    let cfg = gcfg.relative_to(rhs_norm);
    let phase1 = gmres(&one, &rhs, None, &cfg.with_basis())?;
    let report = extract_ritz(phase1.basis.as_ref().expect("basis requested"), &one, threshold)?;
    let ritz = RitzSummary {
        values: report.values(),
        residuals: report.pairs.iter().map(|p| p.residual).collect(),
        complex_excluded: report.complex_excluded,
        res_max: res_max(&report.pairs).ok(),
    };

    let mut two_level = Vec::new();
    if !report.pairs.is_empty() {
        let space = ritz_split(&report.vectors()?, &p.dec)?;
        let groups = space.groups.clone().expect("split spaces carry groups");
        two_level = solves
            .par_iter()
            .map(|&solve| {
                let kind = match solve {
                    CoarseSolve::Exact => SolverKind::ExactLu,
                    CoarseSolve::Ilu0 => SolverKind::Ilu0 {
                        column_groups: groups.clone(),
                    },
                };
                let proj = ProjectionOperator::new(&one, space.z.clone(), kind)?;
                let (rho_right, rho_left) = proj.rho_norms();
                let runs = KINDS
                    .par_iter()
                    .map(|&k| {
                        let op = PreconditionedOperator::projected(&one, k, Side::Left, &proj)?;
                        let prhs = op.precondition(&rhs);
                        let r = gmres(&op, &prhs, None, &cfg)?;
                        Ok(method_run(k, &r, rhs_norm / norm2(&prhs)))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(TwoLevel {
                    solve,
                    coarse_dim: space.rank(),
                    dropped: space.dropped,
                    rho_right,
                    rho_left,
                    e_asymmetry: proj.e_asymmetry(),
                    runs,
                })
            })
            .collect::<Result<Vec<_>>>()?;
    }
    Ok(CaseResult {
        kappa,
        nparts,
        n: p.a.rows(),
        one_level: method_run(PrecondKind::Ras, &phase1, 1.0),
        ritz,
        two_level,
    })
}

pub fn run_all(cfg: &Resolved, solves: &[CoarseSolve]) -> Result<Vec<CaseResult>> {
    let gcfg = GmresConfig::new(cfg.tol, cfg.max_iters)?;
    let cases: Vec<(KappaField, usize)> = cfg
        .kappa
        .iter()
        .flat_map(|&k| cfg.nparts.iter().map(move |&p| (k, p)))
        .collect();
    cases
        .par_iter()
        .map(|&(k, p)| run_case(cfg.grid, k, p, cfg.overlap, cfg.ritz_threshold, &gcfg, solves))
        .collect()
}

fn stem(c: &CaseResult) -> String {
    format!("{}_{}", c.kappa.name(), c.nparts)
}

fn method_stem(kind: PrecondKind) -> String {
    kind.label().replace('_', "").to_lowercase()
}

fn write_case_files(out: &Output, c: &CaseResult) -> Result<()> {
    let s = stem(c);
    out.write_history(&format!("history_{s}_ras.csv"), &c.one_level.history)?;
    let ritz_rows: Vec<Vec<String>> = c
        .ritz
        .values
        .iter()
        .zip(&c.ritz.residuals)
        .enumerate()
        .map(|(i, (v, r))| vec![i.to_string(), fmt_f64(*v), fmt_f64(*r)])
        .collect();
    out.write_csv(&format!("ritz_{s}.csv"), &["index", "value", "residual"], &ritz_rows)?;
    for t in &c.two_level {
        for r in &t.runs {
            out.write_history(
                &format!("history_{s}_{}_{}.csv", t.solve.name(), method_stem(r.kind)),
                &r.history,
            )?;
        }
    }
    Ok(())
}

const SUMMARY_HEADER: [&str; 21] = [
    "kappa",
    "nparts",
    "n",
    "coarse_solve",
    "ras_only",
    "ritz_count",
    "complex_excluded",
    "res_max",
    "coarse_dim",
    "dropped",
    "rho_right",
    "rho_left",
    "P_D",
    "P_C",
    "P_A",
    "P_D_final",
    "P_C_final",
    "P_A_final",
    "P_D_final_own",
    "P_C_final_own",
    "P_A_final_own",
];

fn summary_rows(cases: &[CaseResult]) -> Vec<Vec<String>> {
    let mut rows = Vec::new();
    for c in cases {
        let head = vec![
            c.kappa.name().to_string(),
            c.nparts.to_string(),
            c.n.to_string(),
        ];
        let ritz = vec![
            c.one_level.count.cell(),
            c.ritz.values.len().to_string(),
            c.ritz.complex_excluded.to_string(),
            c.ritz.res_max.map_or("none".into(), fmt_f64),
        ];
        if c.two_level.is_empty() {
            let mut row = head.clone();
            row.push("none".into());
            row.extend(ritz.iter().cloned());
            row.extend(std::iter::repeat("none".to_string()).take(SUMMARY_HEADER.len() - 8));
            rows.push(row);
        }
        for t in &c.two_level {
            let mut row = head.clone();
            row.push(t.solve.name().into());
            row.extend(ritz.iter().cloned());
            row.extend([
                t.coarse_dim.to_string(),
                t.dropped.to_string(),
                fmt_f64(t.rho_right),
                fmt_f64(t.rho_left),
            ]);
            row.extend(KINDS.iter().map(|&k| t.run(k).count.cell()));
            row.extend(KINDS.iter().map(|&k| fmt_f64(t.run(k).final_residual)));
            row.extend(KINDS.iter().map(|&k| fmt_f64(t.run(k).final_residual_own)));
            rows.push(row);
        }
    }
    rows
}

pub fn run_experiment(cfg: &Resolved, out: &Output, solves: &[CoarseSolve]) -> Result<Vec<CaseResult>> {
    let cases = run_all(cfg, solves)?;
    for c in &cases {
        write_case_files(out, c)?;
    }
    out.write_csv("summary.csv", &SUMMARY_HEADER, &summary_rows(&cases))?;
    Ok(cases)
}

/// Writes the decomposition map for each requested subdomain count.
pub fn write_decompositions(cfg: &Resolved, out: &Output) -> Result<()> {
    for &nparts in &cfg.nparts {
        let grid = Grid2D::square(cfg.grid)?;
        let (a, _) = assemble(&grid, &KappaField::Constant(1.0))?;
        let dec = add_overlap(&partition(&grid, nparts)?, cfg.overlap, &a)?;
        out.write_json(&format!("decomposition_{nparts}.json"), &dec)?;
    }
    Ok(())
}
