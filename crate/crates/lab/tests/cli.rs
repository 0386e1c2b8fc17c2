use std::path::Path;
use std::process::Command;

use deflation_core::coarse::{write_coarse_space, CoarseSpace, Provenance};
use deflation_core::linalg::{write_matrix_market, DenseMatrix, SparseMatrix};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_deflation-lab"))
}

fn write_config(dir: &Path, body: &str) -> std::path::PathBuf {
    let path = dir.join("config.json");
    std::fs::write(&path, body).unwrap();
    path
}

#[test]
fn bound_suite_run_writes_reports() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"experiment": "bound-suite", "trials": 4}"#);
    let out = dir.path().join("out");
    let status = bin()
        .args(["run", "bound-suite", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .args(["--seed", "5"])
        .env("DEFLATION_LAB_THREADS", "2")
        .status()
        .unwrap();
    assert!(status.success());
    let summary = std::fs::read_to_string(out.join("summary.csv")).unwrap();
    assert!(summary.lines().nth(1).unwrap().starts_with("5,v"));
    assert_eq!(summary.lines().count(), 7);
    assert!(out.join("bounds_deflation.json").exists());
    assert!(out.join("bounds_orthogonal_space.json").exists());
}

#[test]
fn mismatched_config_is_refused() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"experiment": "diag-table1"}"#);
    let output = bin()
        .args(["run", "diag-table2", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(!output.status.success());
    assert!(String::from_utf8_lossy(&output.stderr).contains("diag-table1"));
}

#[test]
fn unknown_field_and_experiment_are_refused() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"experiment": "diag-table1", "colour": 3}"#);
    let status = bin()
        .args(["run", "diag-table1", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path())
        .status()
        .unwrap();
    assert!(!status.success());
    let output = bin().args(["run", "table9", "--out"]).arg(dir.path()).output().unwrap();
    assert!(!output.status.success());
}

#[test]
fn bad_thread_count_is_refused() {
    let dir = tempfile::tempdir().unwrap();
    let status = bin()
        .args(["run", "diag-table1", "--out"])
        .arg(dir.path())
        .env("DEFLATION_LAB_THREADS", "zero")
        .status()
        .unwrap();
    assert!(!status.success());
}

#[test]
fn spectrum_of_deflated_diagonal() {
    let dir = tempfile::tempdir().unwrap();
    let mtx = dir.path().join("a.mtx");
    let coarse = dir.path().join("z.csv");
    write_matrix_market(&SparseMatrix::from_diag(&[0.01, 0.02, 3.0, 4.0]), &mtx).unwrap();
    let z = CoarseSpace::new(DenseMatrix::identity_columns(4, 2), Provenance::Imported).unwrap();
    write_coarse_space(&z, &coarse).unwrap();
    let output = bin()
        .args(["spectrum", "--precond", "pa", "--matrix"])
        .arg(&mtx)
        .arg("--coarse")
        .arg(&coarse)
        .output()
        .unwrap();
    assert!(output.status.success(), "{}", String::from_utf8_lossy(&output.stderr));
    let text = String::from_utf8(output.stdout).unwrap();
    let values: Vec<f64> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    let want = [1.0, 1.0, 3.0, 4.0];
    for (v, w) in values.iter().zip(want) {
        assert!((v - w).abs() < 1e-12, "{values:?}");
    }

    let output = bin().args(["spectrum", "--precond", "pd", "--matrix"]).arg(&mtx).output().unwrap();
    assert!(!output.status.success());
}
