use std::fmt;
use std::path::Path;
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use deflation_core::pde::KappaField;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentId {
    DiagTable1,
    DiagTable2,
    DiagTable3,
    DiagSpectra,
    BvpConvergence,
    BvpIlu,
    BoundSuite,
}

impl ExperimentId {
    pub const ALL: [ExperimentId; 7] = [
        ExperimentId::DiagTable1,
        ExperimentId::DiagTable2,
        ExperimentId::DiagTable3,
        ExperimentId::DiagSpectra,
        ExperimentId::BvpConvergence,
        ExperimentId::BvpIlu,
        ExperimentId::BoundSuite,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ExperimentId::DiagTable1 => "diag-table1",
            ExperimentId::DiagTable2 => "diag-table2",
            ExperimentId::DiagTable3 => "diag-table3",
            ExperimentId::DiagSpectra => "diag-spectra",
            ExperimentId::BvpConvergence => "bvp-convergence",
            ExperimentId::BvpIlu => "bvp-ilu",
            ExperimentId::BoundSuite => "bound-suite",
        }
    }

    fn is_bvp(self) -> bool {
        matches!(self, ExperimentId::BvpConvergence | ExperimentId::BvpIlu)
    }
}

impl fmt::Display for ExperimentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ExperimentId {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|id| id.as_str() == s)
            .with_context(|| {
                let known: Vec<&str> = Self::ALL.iter().map(|id| id.as_str()).collect();
                format!("unknown experiment '{s}'; expected one of {}", known.join(", "))
            })
    }
}

/// Experiment parameters. Every field except `experiment` is optional and
/// falls back to the defaults of that experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentId,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub tol: Option<f64>,
    #[serde(default)]
    pub max_iters: Option<usize>,
    /// Perturbation scales: coarse-space noise for tables 1 and 2, surrogate
    /// noise for table 3.
    #[serde(default)]
    pub eps: Option<Vec<f64>>,
    #[serde(default)]
    pub nparts: Option<Vec<usize>>,
    #[serde(default)]
    pub kappa: Option<Vec<KappaField>>,
    /// Interior nodes per axis.
    #[serde(default)]
    pub grid: Option<usize>,
    #[serde(default)]
    pub overlap: Option<usize>,
    #[serde(default)]
    pub ritz_threshold: Option<f64>,
    /// Trials per bound in the bound suite.
    #[serde(default)]
    pub trials: Option<usize>,
    /// Coarse-space noise scale for the perturbed-space spectra.
    #[serde(default)]
    pub spectra_space_eps: Option<f64>,
    /// Surrogate noise scale for the perturbed-E spectra.
    #[serde(default)]
    pub spectra_e_eps: Option<f64>,
    #[serde(default)]
    pub out_dir: Option<String>,
}

/// A config with every default filled in.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Resolved {
    pub experiment: ExperimentId,
    pub seed: u64,
    pub tol: f64,
    pub max_iters: usize,
    pub eps: Vec<f64>,
    pub nparts: Vec<usize>,
    pub kappa: Vec<KappaField>,
    pub grid: usize,
    pub overlap: usize,
    pub ritz_threshold: f64,
    pub trials: usize,
    pub spectra_space_eps: f64,
    pub spectra_e_eps: f64,
}

pub const DEFAULT_SEED: u64 = 20240607;

impl ExperimentConfig {
    pub fn new(experiment: ExperimentId) -> Self {
        Self {
            experiment,
            seed: None,
            tol: None,
            max_iters: None,
            eps: None,
            nparts: None,
            kappa: None,
            grid: None,
            overlap: None,
            ritz_threshold: None,
            trials: None,
            spectra_space_eps: None,
            spectra_e_eps: None,
            out_dir: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::from_json(&text).with_context(|| format!("parsing {}", path.display()))
    }

    pub fn resolve(&self) -> Result<Resolved> {
        let id = self.experiment;
        let default_eps = match id {
            ExperimentId::DiagTable3 => vec![1e10, 1e12, 1e14, 1e16],
            _ => vec![1e1, 1e2, 1e3, 1e4, 1e5],
        };
        let r = Resolved {
            experiment: id,
            seed: self.seed.unwrap_or(DEFAULT_SEED),
            tol: self.tol.unwrap_or(if id.is_bvp() { 1e-10 } else { 1e-12 }),
            max_iters: self.max_iters.unwrap_or(300),
            eps: self.eps.clone().unwrap_or(default_eps),
            nparts: self.nparts.clone().unwrap_or_else(|| vec![16, 32, 64, 128]),
            kappa: self
                .kappa
                .clone()
                .unwrap_or_else(|| vec![KappaField::Skyscraper, KappaField::Continuous]),
            grid: self.grid.unwrap_or(101),
            overlap: self.overlap.unwrap_or(2),
            ritz_threshold: self.ritz_threshold.unwrap_or(0.5),
            trials: self.trials.unwrap_or(50),
            spectra_space_eps: self.spectra_space_eps.unwrap_or(1e3),
            spectra_e_eps: self.spectra_e_eps.unwrap_or(1e12),
        };
        r.validate()?;
        Ok(r)
    }
}

impl Resolved {
    fn validate(&self) -> Result<()> {
        let positive = [
            ("tol", self.tol),
            ("ritz_threshold", self.ritz_threshold),
            ("spectra_space_eps", self.spectra_space_eps),
            ("spectra_e_eps", self.spectra_e_eps),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                bail!("{name} must be positive and finite, got {v}");
            }
        }
        if let Some(e) = self.eps.iter().find(|e| !(**e > 0.0 && e.is_finite())) {
            bail!("eps values must be positive and finite, got {e}");
        }
        if self.eps.is_empty() {
            bail!("eps list is empty");
        }
        for (name, v) in [
            ("max_iters", self.max_iters),
            ("grid", self.grid),
            ("trials", self.trials),
        ] {
            if v == 0 {
                bail!("{name} must be positive");
            }
        }
        if self.nparts.is_empty() || self.nparts.contains(&0) {
            bail!("nparts must be a nonempty list of positive counts");
        }
        if self.kappa.is_empty() {
            bail!("kappa list is empty");
        }
        Ok(())
    }
}
