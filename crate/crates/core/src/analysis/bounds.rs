use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::analysis::spectrum::{SpectralSplit, Spectrum};
use crate::coarse::SubspaceAngle;
use crate::error::{Error, Result};
use crate::linalg::{sym_eigvals, DenseMatrix};

/// Deflated-cluster tolerance, relative to `λ_max(A)`.
pub const CLUSTER_REL_TOL: f64 = 1e-8;
/// Containment slack, relative to `max(λ_max(A), 1)`.
pub const CONTAINMENT_REL_SLACK: f64 = 1e-9;
/// Pairing tolerance between the adapted-deflation and deflation spectra.
pub const PAIRING_TOL: f64 = 1e-8;
const MIN_COS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundKind {
    Deflation,
    AdaptedDeflation,
    CoarseCorrection,
    InexactDeflation,
    InexactCoarseCorrection,
    InexactAdaptedDeflation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClusterKind {
    Zero,
    One,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cluster {
    pub kind: ClusterKind,
    pub expected: usize,
    pub found: usize,
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub kind: BoundKind,
    pub lower: f64,
    pub upper: f64,
    /// Real parts, ascending.
    pub spectrum: Vec<f64>,
    pub max_imag: f64,
    /// Eigenvalues the interval is checked against.
    pub checked: usize,
    pub cluster: Option<Cluster>,
    pub hypothesis_satisfied: bool,
    pub hypothesis_note: Option<String>,
    pub contained: bool,
    /// Largest distance by which a checked eigenvalue leaves the interval.
    pub slack: f64,
    pub params: BTreeMap<String, f64>,
    /// Largest gap in the pairing with the deflation spectrum.
    pub pairing_deviation: Option<f64>,
    pub all_positive: Option<bool>,
}

impl BoundReport {
    /// A proven bound failed on a trial that satisfied its hypotheses.
    pub fn is_violation(&self) -> bool {
        self.hypothesis_satisfied
            && (!self.contained
                || self.pairing_deviation.is_some_and(|d| d > PAIRING_TOL)
                || self.all_positive == Some(false)
                || self.cluster.as_ref().is_some_and(|c| c.found != c.expected))
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// `(‖E‖₂, ‖E⁻¹‖₂)` for symmetric positive definite `E`.
pub fn e_norms(e: &DenseMatrix) -> Result<(f64, f64)> {
    let r = e.rows();
    let sym = DenseMatrix::from_fn(r, r, |i, j| 0.5 * (e[(i, j)] + e[(j, i)]));
    let vals = sym_eigvals(&sym)?;
    let (min, max) = (vals[0], vals[r - 1]);
    if min <= 0.0 {
        return Err(Error::Hypothesis(format!("E is not positive definite (λ_min = {min:e})")));
    }
    Ok((max, 1.0 / min))
}

pub fn eta_d(split: &SpectralSplit, angle: &SubspaceAngle) -> f64 {
    split.perp_max() * (angle.sin + angle.sin * angle.sin)
}

pub fn eps_d(split: &SpectralSplit, e_norm: f64, e_inv_norm: f64, angle: &SubspaceAngle) -> f64 {
    let t = angle.tan();
    eta_d(split, angle) + e_inv_norm * (e_norm + split.perp_max()).powi(2) * t * t
}

pub fn eps_c(split: &SpectralSplit, e_inv_norm: f64, angle: &SubspaceAngle) -> f64 {
    0.5 * (split.perp_max() * e_inv_norm + 1.0) * angle.tan() + angle.sin + angle.sin * angle.sin
}

pub fn xi_d(split: &SpectralSplit, rho: f64) -> f64 {
    rho * split.lambda_max()
}

pub fn xi_c(rho: f64) -> f64 {
    rho
}

pub fn xi_a(split: &SpectralSplit, rho1: f64, rho2: f64) -> f64 {
    rho1 * split.lambda_max() + rho2
}

fn check_angle(angle: &SubspaceAngle) -> Result<()> {
    if angle.cos < MIN_COS {
        return Err(Error::Hypothesis(format!(
            "coarse space is orthogonal to the target space (cos θ = {:e})",
            angle.cos
        )));
    }
    Ok(())
}

fn check_len(split: &SpectralSplit, spectrum: &Spectrum) -> Result<()> {
    if spectrum.len() != split.n() {
        return Err(Error::Dimension(format!(
            "spectrum of length {} for a split of order {}",
            spectrum.len(),
            split.n()
        )));
    }
    Ok(())
}

fn interval_check(values: &[f64], lower: f64, upper: f64, scale: f64) -> (bool, f64) {
    let tol = CONTAINMENT_REL_SLACK * scale.max(1.0);
    let slack = values
        .iter()
        .fold(0.0f64, |m, &v| m.max(lower - v).max(v - upper));
    (slack <= tol, slack)
}

/// Indices of the `k` eigenvalues closest to `center`.
fn closest(spectrum: &Spectrum, center: f64, k: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..spectrum.len()).collect();
    idx.sort_by(|&a, &b| {
        let da = (spectrum.re[a] - center).hypot(spectrum.im[a]);
        let db = (spectrum.re[b] - center).hypot(spectrum.im[b]);
        da.total_cmp(&db).then(a.cmp(&b))
    });
    idx.truncate(k);
    idx
}

fn without(spectrum: &Spectrum, removed: &[usize]) -> Vec<f64> {
    spectrum
        .re
        .iter()
        .enumerate()
        .filter(|(i, _)| !removed.contains(i))
        .map(|(_, &v)| v)
        .collect()
}

struct Draft {
    kind: BoundKind,
    lower: f64,
    upper: f64,
    checked: Vec<f64>,
    cluster: Option<Cluster>,
    hypothesis_note: Option<String>,
    params: BTreeMap<String, f64>,
}

fn finish(split: &SpectralSplit, spectrum: &Spectrum, d: Draft) -> BoundReport {
    let (contained, slack) = interval_check(&d.checked, d.lower, d.upper, split.perp_max());
    BoundReport {
        kind: d.kind,
        lower: d.lower,
        upper: d.upper,
        spectrum: spectrum.re.clone(),
        max_imag: spectrum.max_imag,
        checked: d.checked.len(),
        cluster: d.cluster,
        hypothesis_satisfied: d.hypothesis_note.is_none(),
        hypothesis_note: d.hypothesis_note,
        contained,
        slack,
        params: d.params,
        pairing_deviation: None,
        all_positive: None,
    }
}

fn params(pairs: &[(&str, f64)]) -> BTreeMap<String, f64> {
    pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

fn cluster(spectrum: &Spectrum, kind: ClusterKind, expected: usize, split: &SpectralSplit) -> Cluster {
    let tolerance = CLUSTER_REL_TOL * split.perp_max();
    let center = match kind {
        ClusterKind::Zero => 0.0,
        ClusterKind::One => 1.0,
    };
    Cluster {
        kind,
        expected,
        found: spectrum.count_near(center, tolerance),
        tolerance,
    }
}

/// Deflation with an approximate coarse space and exact `E = ZᵀAZ`:
/// the `n − r` nonzero eigenvalues of `P_D A` lie in
/// `[λ_min(Λ⊥) − ε_D, λ_max(Λ⊥) + η_D]`.
pub fn bound_pd(split: &SpectralSplit, e: &DenseMatrix, angle: &SubspaceAngle, spectrum: &Spectrum) -> Result<BoundReport> {
    check_angle(angle)?;
    check_len(split, spectrum)?;
    let (en, einv) = e_norms(e)?;
    let eta = eta_d(split, angle);
    let eps = eps_d(split, en, einv, angle);
    let zeros = closest(spectrum, 0.0, split.r());
    Ok(finish(
        split,
        spectrum,
        Draft {
            kind: BoundKind::Deflation,
            lower: split.perp_min() - eps,
            upper: split.perp_max() + eta,
            checked: without(spectrum, &zeros),
            cluster: Some(cluster(spectrum, ClusterKind::Zero, split.r(), split)),
            hypothesis_note: None,
            params: params(&[
                ("sin_theta", angle.sin),
                ("eta_d", eta),
                ("eps_d", eps),
                ("e_norm", en),
                ("e_inv_norm", einv),
            ]),
        },
    ))
}

/// Adapted deflation: all eigenvalues of `P_A A` lie in
/// `[min{1, λ_min(Λ⊥) − ε_D}, max{1, λ_max(Λ⊥) + η_D}]`. When the deflation
/// spectrum for the same `Z` is supplied, `spec(P_A A)` is also compared with
/// `{1ʳ} ∪ nonzero spec(P_D A)` as multisets.
pub fn bound_pa(
    split: &SpectralSplit,
    e: &DenseMatrix,
    angle: &SubspaceAngle,
    spectrum: &Spectrum,
    deflation_spectrum: Option<&Spectrum>,
) -> Result<BoundReport> {
    check_angle(angle)?;
    check_len(split, spectrum)?;
    let (en, einv) = e_norms(e)?;
    let eta = eta_d(split, angle);
    let eps = eps_d(split, en, einv, angle);
    let mut report = finish(
        split,
        spectrum,
        Draft {
            kind: BoundKind::AdaptedDeflation,
            lower: 1f64.min(split.perp_min() - eps),
            upper: 1f64.max(split.perp_max() + eta),
            checked: spectrum.re.clone(),
            cluster: Some(cluster(spectrum, ClusterKind::One, split.r(), split)),
            hypothesis_note: None,
            params: params(&[
                ("sin_theta", angle.sin),
                ("eta_d", eta),
                ("eps_d", eps),
                ("e_norm", en),
                ("e_inv_norm", einv),
            ]),
        },
    );
    // the native spectrum may itself contain values near 1
    if let Some(c) = report.cluster.as_mut() {
        c.expected = c.found.max(c.expected);
    }
    if let Some(pd) = deflation_spectrum {
        check_len(split, pd)?;
        let zeros = closest(pd, 0.0, split.r());
        let mut predicted = without(pd, &zeros);
        predicted.extend(std::iter::repeat(1.0).take(split.r()));
        predicted.sort_by(f64::total_cmp);
        let mut actual = spectrum.re.clone();
        actual.sort_by(f64::total_cmp);
        let dev = predicted
            .iter()
            .zip(&actual)
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        report.pairing_deviation = Some(dev.max(spectrum.max_imag));
    }
    Ok(report)
}

/// Coarse correction: all eigenvalues of `P_C A` are positive and lie in
/// `[min{1 + λ_min(Λ), λ_min(Λ⊥)} − ε_C, max{1 + λ_max(Λ), λ_max(Λ⊥)} + ε_C]`.
pub fn bound_pc(split: &SpectralSplit, e: &DenseMatrix, angle: &SubspaceAngle, spectrum: &Spectrum) -> Result<BoundReport> {
    check_angle(angle)?;
    check_len(split, spectrum)?;
    let (en, einv) = e_norms(e)?;
    let eps = eps_c(split, einv, angle);
    let mut report = finish(
        split,
        spectrum,
        Draft {
            kind: BoundKind::CoarseCorrection,
            lower: (1.0 + split.lambda_min()).min(split.perp_min()) - eps,
            upper: (1.0 + split.lambda_max()).max(split.perp_max()) + eps,
            checked: spectrum.re.clone(),
            cluster: None,
            hypothesis_note: None,
            params: params(&[
                ("sin_theta", angle.sin),
                ("eps_c", eps),
                ("e_norm", en),
                ("e_inv_norm", einv),
            ]),
        },
    );
    report.all_positive = Some(spectrum.re.iter().all(|&v| v > 0.0));
    Ok(report)
}

fn realness_note(spectrum: &Spectrum) -> Option<String> {
    (!spectrum.is_real()).then(|| {
        format!(
            "spectrum is not real (max |imag| = {:e}, radius {:e})",
            spectrum.max_imag,
            spectrum.spectral_radius()
        )
    })
}

/// Deflation with exact coarse space and surrogate `H ≈ E`:
/// `[−ξ_D, λ_max(Λ⊥) + ξ_D]` with `ξ_D = ‖E H⁻¹ − I‖₂ ‖Λ‖₂`, given real eigenvalues.
pub fn bound_inexact_d(split: &SpectralSplit, rho: f64, spectrum: &Spectrum) -> Result<BoundReport> {
    check_len(split, spectrum)?;
    let xi = xi_d(split, rho);
    Ok(finish(
        split,
        spectrum,
        Draft {
            kind: BoundKind::InexactDeflation,
            lower: -xi,
            upper: split.perp_max() + xi,
            checked: spectrum.re.clone(),
            cluster: None,
            hypothesis_note: realness_note(spectrum),
            params: params(&[("rho", rho), ("xi_d", xi)]),
        },
    ))
}

/// Coarse correction with surrogate `H`: the exact-space interval widened by
/// `ξ_C = ‖H⁻¹ E − I‖₂`, given real eigenvalues.
pub fn bound_inexact_c(split: &SpectralSplit, rho: f64, spectrum: &Spectrum) -> Result<BoundReport> {
    check_len(split, spectrum)?;
    let xi = xi_c(rho);
    Ok(finish(
        split,
        spectrum,
        Draft {
            kind: BoundKind::InexactCoarseCorrection,
            lower: (1.0 + split.lambda_min()).min(split.perp_min()) - xi,
            upper: (1.0 + split.lambda_max()).max(split.perp_max()) + xi,
            checked: spectrum.re.clone(),
            cluster: None,
            hypothesis_note: realness_note(spectrum),
            params: params(&[("rho", rho), ("xi_c", xi)]),
        },
    ))
}

/// Adapted deflation with surrogate `H`:
/// `[min{1, λ_min(Λ⊥)} − ξ_A, max{1, λ_max(Λ⊥)} + ξ_A]` with
/// `ξ_A = ‖E H⁻¹ − I‖₂ ‖Λ‖₂ + ‖H⁻¹ E − I‖₂`, given real eigenvalues.
pub fn bound_inexact_a(split: &SpectralSplit, rho1: f64, rho2: f64, spectrum: &Spectrum) -> Result<BoundReport> {
    check_len(split, spectrum)?;
    let xi = xi_a(split, rho1, rho2);
    Ok(finish(
        split,
        spectrum,
        Draft {
            kind: BoundKind::InexactAdaptedDeflation,
            lower: 1f64.min(split.perp_min()) - xi,
            upper: 1f64.max(split.perp_max()) + xi,
            checked: spectrum.re.clone(),
            cluster: None,
            hypothesis_note: realness_note(spectrum),
            params: params(&[("rho1", rho1), ("rho2", rho2), ("xi_a", xi)]),
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exact_angle() -> SubspaceAngle {
        SubspaceAngle {
            sin: 0.0,
            cos: 1.0,
            dist: 0.0,
            cross_check: None,
        }
    }

    fn spec(v: &[f64]) -> Spectrum {
        Spectrum {
            re: v.to_vec(),
            im: vec![0.0; v.len()],
            max_imag: 0.0,
            symmetric: true,
        }
    }

    #[test]
    fn exact_space_collapses_to_exact_spectra() {
        let split = SpectralSplit::from_eigenvalues(&[0.1, 0.2, 2.0, 3.0], 2).unwrap();
        let e = DenseMatrix::from_diag(&[0.1, 0.2]);
        let pd = bound_pd(&split, &e, &exact_angle(), &spec(&[0.0, 0.0, 2.0, 3.0])).unwrap();
        assert_eq!((pd.lower, pd.upper), (2.0, 3.0));
        assert!(pd.contained && !pd.is_violation());
        let pc = bound_pc(&split, &e, &exact_angle(), &spec(&[1.1, 1.2, 2.0, 3.0])).unwrap();
        assert!((pc.lower - 1.1).abs() < 1e-15 && pc.upper == 3.0);
        let pa = bound_pa(
            &split,
            &e,
            &exact_angle(),
            &spec(&[1.0, 1.0, 2.0, 3.0]),
            Some(&spec(&[0.0, 0.0, 2.0, 3.0])),
        )
        .unwrap();
        assert_eq!(pa.pairing_deviation, Some(0.0));
        assert!(!pa.is_violation());
    }

    #[test]
    fn orthogonal_space_is_a_hypothesis_error() {
        let split = SpectralSplit::from_eigenvalues(&[0.1, 2.0], 1).unwrap();
        let angle = SubspaceAngle {
            sin: 1.0,
            cos: 0.0,
            dist: 1.0,
            cross_check: None,
        };
        let e = DenseMatrix::from_diag(&[2.0]);
        assert!(matches!(
            bound_pd(&split, &e, &angle, &spec(&[0.0, 0.1])),
            Err(Error::Hypothesis(_))
        ));
    }

    #[test]
    fn complex_spectrum_marks_hypothesis() {
        let split = SpectralSplit::from_eigenvalues(&[0.1, 2.0], 1).unwrap();
        let s = Spectrum {
            re: vec![1.0, 1.0],
            im: vec![-0.5, 0.5],
            max_imag: 0.5,
            symmetric: false,
        };
        let r = bound_inexact_c(&split, 0.1, &s).unwrap();
        assert!(!r.hypothesis_satisfied);
        assert!(!r.is_violation());
    }

    #[test]
    fn widths_grow_with_angle() {
        let split = SpectralSplit::from_eigenvalues(&[0.01, 0.02, 1.0, 5.0], 2).unwrap();
        let mut last = (0.0, 0.0, 0.0);
        for k in 0..50 {
            let t = k as f64 * 0.03;
            let a = SubspaceAngle {
                sin: t.sin(),
                cos: t.cos(),
                dist: t.sin(),
                cross_check: None,
            };
            let now = (eta_d(&split, &a), eps_d(&split, 1.0, 10.0, &a), eps_c(&split, 10.0, &a));
            assert!(now.0 >= last.0 && now.1 >= last.1 && now.2 >= last.2);
            last = now;
        }
    }
}
