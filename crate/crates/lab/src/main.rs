use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use deflation_core::analysis::spectrum_csv_string;
use deflation_lab::run::{matrix_spectrum, parse_precond};
use deflation_lab::{run_experiment, ExperimentConfig, ExperimentId};

const THREADS_VAR: &str = "DEFLATION_LAB_THREADS";

#[derive(Parser)]
#[command(name = "deflation-lab", version, about = "Deflation and coarse-correction experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment and write its tables under --out.
    Run {
        experiment: ExperimentId,
        /// JSON config; omitted fields take the experiment's defaults.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Output directory; falls back to the config's out_dir.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Overrides the config seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Dense spectrum of P·A for a Matrix Market A, written as CSV.
    Spectrum {
        #[arg(long)]
        matrix: PathBuf,
        /// One of pd, pc, pa, none.
        #[arg(long, default_value = "none")]
        precond: String,
        /// Coarse basis as dense CSV.
        #[arg(long)]
        coarse: Option<PathBuf>,
        /// Write here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Largest order materialized densely.
        #[arg(long)]
        cap: Option<usize>,
    },
}

fn init_threads() -> Result<()> {
    let Ok(value) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let n: usize = value
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .with_context(|| format!("{THREADS_VAR} must be a positive integer, got '{value}'"))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    Ok(())
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Run {
            experiment,
            config,
            out,
            seed,
        } => {
            let mut cfg = match &config {
                Some(path) => ExperimentConfig::load(path)?,
                None => ExperimentConfig::new(experiment),
            };
            if cfg.experiment != experiment {
                bail!("config is for '{}', not '{experiment}'", cfg.experiment);
            }
            if seed.is_some() {
                cfg.seed = seed;
            }
            let Some(dir) = out.or_else(|| cfg.out_dir.clone().map(PathBuf::from)) else {
                bail!("no output directory: pass --out or set out_dir in the config");
            };
            let resolved = cfg.resolve()?;
            let outcome = run_experiment(&resolved, &dir)?;
            eprintln!("{experiment}: wrote {}", dir.display());
            if outcome.violations > 0 {
                eprintln!("{} bound violations", outcome.violations);
                return Ok(ExitCode::FAILURE);
            }
        }
        Command::Spectrum {
            matrix,
            precond,
            coarse,
            out,
            cap,
        } => {
            let kind = parse_precond(&precond)?;
            let spectrum = matrix_spectrum(&matrix, kind, coarse.as_deref(), cap)?;
            let csv = spectrum_csv_string(&spectrum);
            match out {
                Some(path) => std::fs::write(&path, csv).with_context(|| format!("writing {}", path.display()))?,
                None => print!("{csv}"),
            }
            eprintln!(
                "{} eigenvalues, max |imag| {:e}",
                spectrum.len(),
                spectrum.max_imag
            );
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = init_threads() {
        eprintln!("error: {e:#}");
        return ExitCode::from(2);
    }
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
