//! The diagonal test problem: order 2000, seven eigenvalues below one.

use anyhow::Result;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use deflation_core::analysis::{spectrum_of, Spectrum};
use deflation_core::coarse::{perturb_space, res_max, subspace_angle};
use deflation_core::krylov::{gmres, rayleigh_ritz, GmresConfig, GmresResult};
use deflation_core::linalg::{norm2, DenseMatrix, LinearOperator, SparseMatrix};
use deflation_core::precond::{PrecondKind, PreconditionedOperator, ProjectionOperator, Side, SolverKind};

use crate::config::Resolved;
use crate::output::{fmt_f64, Count, Output};

pub const N: usize = 2000;
pub const R: usize = 7;

pub const KINDS: [PrecondKind; 3] = [PrecondKind::Pd, PrecondKind::Pc, PrecondKind::Pa];

/// `1e-7, …, 1e-1, 1`, then `10.0, 10.1, …, 209.1`.
pub fn diagonal_entries() -> Vec<f64> {
    let mut d: Vec<f64> = (-7..=-1).map(|k| 10f64.powi(k)).collect();
    d.push(1.0);
    d.extend((100..=2091).map(|k| k as f64 / 10.0));
    d
}

pub fn diagonal_matrix() -> SparseMatrix {
    SparseMatrix::from_diag(&diagonal_entries())
}

/// `(e₁, …, e₇)`.
pub fn exact_space() -> DenseMatrix {
    DenseMatrix::identity_columns(N, R)
}

fn cell_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Random stream for the coarse-space perturbation at index `k` of the ε list.
pub fn space_rng(seed: u64, k: usize) -> ChaCha8Rng {
    cell_rng(seed, 1000 + k as u64)
}

/// Random stream for the surrogate perturbation at index `k`.
pub fn surrogate_rng(seed: u64, k: usize) -> ChaCha8Rng {
    cell_rng(seed, 2000 + k as u64)
}

pub fn perturbed_space(seed: u64, k: usize, eps: f64) -> Result<DenseMatrix> {
    Ok(perturb_space(&exact_space(), eps, &mut space_rng(seed, k))?.z)
}

/// `E + R/ε` with `R` uniform on [0, 1).
pub fn perturbed_surrogate(e: &DenseMatrix, seed: u64, k: usize, eps: f64) -> DenseMatrix {
    let noise = DenseMatrix::random_uniform(e.rows(), e.cols(), &mut surrogate_rng(seed, k));
    e.add(&noise.scale(1.0 / eps)).expect("same shape")
}

/// Left-preconditioned GMRES on `P A x = P b` from a zero guess, with
/// residuals measured relative to `‖b‖`.
pub fn solve_projected(
    a: &SparseMatrix,
    proj: &ProjectionOperator,
    kind: PrecondKind,
    b: &[f64],
    cfg: &GmresConfig,
) -> Result<GmresResult> {
    let op = PreconditionedOperator::projected(a, kind, Side::Left, proj)?;
    let rhs = op.precondition(b);
    Ok(gmres(&op, &rhs, None, &cfg.relative_to(norm2(b)))?)
}

pub fn solve_plain(a: &SparseMatrix, b: &[f64], cfg: &GmresConfig) -> Result<GmresResult> {
    Ok(gmres(a, b, None, cfg)?)
}

#[derive(Debug, Clone, Serialize)]
pub struct Table1Row {
    pub eps: f64,
    pub sin_theta: f64,
    pub res_max: f64,
}

pub fn table1(cfg: &Resolved) -> Result<Vec<Table1Row>> {
    let a = diagonal_matrix();
    let v = exact_space();
    cfg.eps
        .par_iter()
        .enumerate()
        .map(|(k, &eps)| {
            let z = perturbed_space(cfg.seed, k, eps)?;
            let angle = subspace_angle(&z, &v)?;
            let pairs = rayleigh_ritz(&a, &z)?;
            Ok(Table1Row {
                eps,
                sin_theta: angle.sin,
                res_max: res_max(&pairs.pairs)?,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct CountsRow {
    /// `None` for the unperturbed row.
    pub eps: Option<f64>,
    pub pd: Count,
    pub pc: Count,
    pub pa: Count,
}

impl CountsRow {
    pub fn get(&self, kind: PrecondKind) -> Count {
        match kind {
            PrecondKind::Pd => self.pd,
            PrecondKind::Pc => self.pc,
            PrecondKind::Pa => self.pa,
            _ => panic!("not a projection preconditioner"),
        }
    }
}

fn counts(a: &SparseMatrix, proj: &ProjectionOperator, gcfg: &GmresConfig, eps: Option<f64>) -> Result<CountsRow> {
    let b = vec![1.0; a.rows()];
    let res: Vec<Count> = KINDS
        .par_iter()
        .map(|&k| solve_projected(a, proj, k, &b, gcfg).map(|r| Count::from_result(&r)))
        .collect::<Result<_>>()?;
    Ok(CountsRow {
        eps,
        pd: res[0],
        pc: res[1],
        pa: res[2],
    })
}

pub fn gmres_config(cfg: &Resolved) -> Result<GmresConfig> {
    Ok(GmresConfig::new(cfg.tol, cfg.max_iters)?)
}

pub fn unpreconditioned(cfg: &Resolved) -> Result<Count> {
    let a = diagonal_matrix();
    let r = solve_plain(&a, &vec![1.0; N], &gmres_config(cfg)?)?;
    Ok(Count::from_result(&r))
}

/// Exact space and exact `E`.
pub fn exact_counts(cfg: &Resolved) -> Result<CountsRow> {
    let a = diagonal_matrix();
    let proj = ProjectionOperator::new(&a, exact_space(), SolverKind::ExactLu)?;
    counts(&a, &proj, &gmres_config(cfg)?, None)
}

/// Perturbed coarse spaces with exact `E = ZᵀAZ`, one row per ε.
pub fn table2(cfg: &Resolved) -> Result<Vec<CountsRow>> {
    let a = diagonal_matrix();
    let gcfg = gmres_config(cfg)?;
    cfg.eps
        .par_iter()
        .enumerate()
        .map(|(k, &eps)| {
            let z = perturbed_space(cfg.seed, k, eps)?;
            let proj = ProjectionOperator::new(&a, z, SolverKind::ExactLu)?;
            counts(&a, &proj, &gcfg, Some(eps))
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct Table3Row {
    pub counts: CountsRow,
    /// `‖E H⁻¹ − I‖₂`
    pub rho_right: f64,
    /// `‖H⁻¹ E − I‖₂`
    pub rho_left: f64,
}

/// Exact space with `H = E + R/ε` in place of `E`.
pub fn surrogate_projection(a: &SparseMatrix, seed: u64, k: usize, eps: f64) -> Result<ProjectionOperator> {
    let v = exact_space();
    let e = v.tr_matmul(&a.apply_columns(&v))?;
    let h = perturbed_surrogate(&e, seed, k, eps);
    Ok(ProjectionOperator::new(a, v, SolverKind::Perturbed(h))?)
}

pub fn table3(cfg: &Resolved) -> Result<Vec<Table3Row>> {
    let a = diagonal_matrix();
    let gcfg = gmres_config(cfg)?;
    cfg.eps
        .par_iter()
        .enumerate()
        .map(|(k, &eps)| {
            let proj = surrogate_projection(&a, cfg.seed, k, eps)?;
            let (rho_right, rho_left) = proj.rho_norms();
            Ok(Table3Row {
                counts: counts(&a, &proj, &gcfg, Some(eps))?,
                rho_right,
                rho_left,
            })
        })
        .collect()
}

/// Which inputs a spectrum was computed for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpectrumCase {
    Exact,
    PerturbedSpace,
    PerturbedE,
}

impl SpectrumCase {
    pub fn name(self) -> &'static str {
        match self {
            SpectrumCase::Exact => "exact",
            SpectrumCase::PerturbedSpace => "perturbed-space",
            SpectrumCase::PerturbedE => "perturbed-e",
        }
    }
}

pub fn case_projection(case: SpectrumCase, cfg: &Resolved) -> Result<ProjectionOperator> {
    let a = diagonal_matrix();
    match case {
        SpectrumCase::Exact => Ok(ProjectionOperator::new(&a, exact_space(), SolverKind::ExactLu)?),
        SpectrumCase::PerturbedSpace => {
            let z = perturb_space(&exact_space(), cfg.spectra_space_eps, &mut space_rng(cfg.seed, 999))?.z;
            Ok(ProjectionOperator::new(&a, z, SolverKind::ExactLu)?)
        }
        SpectrumCase::PerturbedE => surrogate_projection(&a, cfg.seed, 999, cfg.spectra_e_eps),
    }
}

/// Spectrum of `P A` for one case and preconditioner.
pub fn preconditioned_spectrum(proj: &ProjectionOperator, kind: PrecondKind) -> Result<Spectrum> {
    let a = diagonal_matrix();
    let op = PreconditionedOperator::projected(&a, kind, Side::Left, proj)?;
    Ok(spectrum_of(&op)?)
}

pub fn run_table1(cfg: &Resolved, out: &Output) -> Result<()> {
    let rows = table1(cfg)?;
    let cells: Vec<Vec<String>> = rows
        .iter()
        .map(|r| vec![fmt_f64(r.eps), fmt_f64(r.sin_theta), fmt_f64(r.res_max)])
        .collect();
    out.write_csv("table1.csv", &["eps", "sin_theta", "res_max"], &cells)?;
    Ok(())
}

fn counts_cells(label: String, row: &CountsRow) -> Vec<String> {
    vec![label, row.pd.cell(), row.pc.cell(), row.pa.cell()]
}

pub fn run_table2(cfg: &Resolved, out: &Output) -> Result<()> {
    let plain = unpreconditioned(cfg)?;
    let exact = exact_counts(cfg)?;
    let rows = table2(cfg)?;
    let mut cells = vec![counts_cells("exact".into(), &exact)];
    cells.extend(rows.iter().map(|r| counts_cells(fmt_f64(r.eps.unwrap()), r)));
    out.write_csv("table2.csv", &["eps", "P_D", "P_C", "P_A"], &cells)?;
    out.write_csv("unpreconditioned.csv", &["iterations"], &[vec![plain.cell()]])?;
    Ok(())
}

pub fn run_table3(cfg: &Resolved, out: &Output) -> Result<()> {
    let rows = table3(cfg)?;
    let cells: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            let mut c = counts_cells(fmt_f64(r.counts.eps.unwrap()), &r.counts);
            c.push(fmt_f64(r.rho_right));
            c.push(fmt_f64(r.rho_left));
            c
        })
        .collect();
    out.write_csv(
        "table3.csv",
        &["eps", "P_D", "P_C", "P_A", "rho_right", "rho_left"],
        &cells,
    )?;
    Ok(())
}

pub fn run_spectra(cfg: &Resolved, out: &Output) -> Result<()> {
    let cases = [SpectrumCase::Exact, SpectrumCase::PerturbedSpace, SpectrumCase::PerturbedE];
    let jobs: Vec<(SpectrumCase, PrecondKind)> = cases
        .iter()
        .flat_map(|&c| KINDS.iter().map(move |&k| (c, k)))
        .collect();
    let spectra: Vec<Spectrum> = jobs
        .par_iter()
        .map(|&(case, kind)| preconditioned_spectrum(&case_projection(case, cfg)?, kind))
        .collect::<Result<_>>()?;
    let mut summary = Vec::new();
    for ((case, kind), s) in jobs.iter().zip(&spectra) {
        let name = format!("spectrum_{}_{}.csv", case.name(), kind.label().replace('_', "").to_lowercase());
        out.write_spectrum(&name, s)?;
        summary.push(vec![
            case.name().to_string(),
            kind.label().to_string(),
            s.count_near(0.0, 1e-3).to_string(),
            s.count_near(1.0, 1e-3).to_string(),
            fmt_f64(s.max_imag),
        ]);
    }
    out.write_csv(
        "spectra_summary.csv",
        &["case", "preconditioner", "near_zero", "near_one", "max_imag"],
        &summary,
    )?;
    Ok(())
}
