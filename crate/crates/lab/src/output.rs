//! Per-experiment output directory. Every CSV row carries the seed and the
//! version string; nothing time-dependent is written.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;

pub fn version() -> String {
    format!("v{}", env!("CARGO_PKG_VERSION"))
}

/// Scientific formatting used in every table.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.6e}")
}

pub struct Output {
    dir: PathBuf,
    seed: u64,
    version: String,
}

impl Output {
    pub fn create(dir: impl AsRef<Path>, seed: u64) -> Result<Self> {
        let dir = dir.as_ref().to_path_buf();
        std::fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
        Ok(Self {
            dir,
            seed,
            version: version(),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    /// Writes `header` and `rows`, each prefixed with `seed,version`.
    pub fn write_csv(&self, name: &str, header: &[&str], rows: &[Vec<String>]) -> Result<PathBuf> {
        let mut out = String::from("seed,version");
        for h in header {
            out.push(',');
            out.push_str(h);
        }
        out.push('\n');
        for row in rows {
            let _ = write!(out, "{},{}", self.seed, self.version);
            for cell in row {
                out.push(',');
                out.push_str(cell);
            }
            out.push('\n');
        }
        let path = self.path(name);
        std::fs::write(&path, out).with_context(|| format!("writing {}", path.display()))?;
        Ok(path)
    }

    pub fn write_json<T: Serialize>(&self, name: &str, value: &T) -> Result<PathBuf> {
        let path = self.path(name);
        let text = serde_json::to_string_pretty(value)? + "\n";
        std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
        Ok(path)
    }

    /// Residual history as `iteration,relative_residual`.
    pub fn write_history(&self, name: &str, history: &[f64]) -> Result<PathBuf> {
        let rows: Vec<Vec<String>> = history
            .iter()
            .enumerate()
            .map(|(k, r)| vec![k.to_string(), fmt_f64(*r)])
            .collect();
        self.write_csv(name, &["iteration", "relative_residual"], &rows)
    }

    /// Spectrum as `index,eigenvalue,imag`.
    pub fn write_spectrum(&self, name: &str, s: &deflation_core::analysis::Spectrum) -> Result<PathBuf> {
        let rows: Vec<Vec<String>> = s
            .re
            .iter()
            .zip(&s.im)
            .enumerate()
            .map(|(k, (r, i))| vec![k.to_string(), format!("{r:.15e}"), format!("{i:.3e}")])
            .collect();
        self.write_csv(name, &["index", "eigenvalue", "imag"], &rows)
    }
}

/// Iteration count, or a cap marker when GMRES did not converge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Count {
    pub iterations: usize,
    pub converged: bool,
}

impl Count {
    pub fn from_result(r: &deflation_core::krylov::GmresResult) -> Self {
        Self {
            iterations: r.iterations,
            converged: r.converged,
        }
    }

    pub fn cell(&self) -> String {
        if self.converged {
            self.iterations.to_string()
        } else {
            format!(">{}", self.iterations)
        }
    }
}
