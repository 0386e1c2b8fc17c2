//! Matrix Market (coordinate, real) for sparse matrices and a small CSV
//! format for dense ones.
//!
//! The dense CSV layout is a `rows,cols` header line, one line with the two
//! dimensions, then one comma-separated line per matrix row. Values are
//! written with Rust's shortest round-trip formatting, so a write/read cycle
//! is lossless.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::linalg::dense::DenseMatrix;
use crate::linalg::sparse::SparseMatrix;

pub fn write_matrix_market_string(a: &SparseMatrix) -> String {
    let mut out = String::new();
    out.push_str("%%MatrixMarket matrix coordinate real general\n");
    let _ = writeln!(out, "{} {} {}", a.rows(), a.cols(), a.nnz());
    for i in 0..a.rows() {
        for (j, v) in a.row(i) {
            let _ = writeln!(out, "{} {} {:?}", i + 1, j + 1, v);
        }
    }
    out
}

pub fn write_matrix_market(a: &SparseMatrix, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, write_matrix_market_string(a))?;
    Ok(())
}

/// Reads `coordinate real|integer general|symmetric` files.
pub fn parse_matrix_market(text: &str) -> Result<SparseMatrix> {
    let mut lines = text.lines().enumerate();
    let (_, banner) = lines.next().ok_or(Error::Parse {
        line: 1,
        msg: "empty file".into(),
    })?;
    let banner_lc = banner.to_ascii_lowercase();
    let tokens: Vec<&str> = banner_lc.split_whitespace().collect();
    if tokens.len() < 5 || tokens[0] != "%%matrixmarket" || tokens[1] != "matrix" {
        return Err(Error::Parse {
            line: 1,
            msg: "missing %%MatrixMarket matrix banner".into(),
        });
    }
    if tokens[2] != "coordinate" {
        return Err(Error::Parse {
            line: 1,
            msg: format!("unsupported format '{}'", tokens[2]),
        });
    }
    if tokens[3] != "real" && tokens[3] != "integer" {
        return Err(Error::Parse {
            line: 1,
            msg: format!("unsupported field '{}'", tokens[3]),
        });
    }
    let symmetric = match tokens[4] {
        "general" => false,
        "symmetric" => true,
        other => {
            return Err(Error::Parse {
                line: 1,
                msg: format!("unsupported symmetry '{other}'"),
            })
        }
    };

    let mut header: Option<(usize, usize, usize)> = None;
    let mut triplets = Vec::new();
    for (ln, line) in lines {
        let line = line.trim();
        if line.is_empty() || line.starts_with('%') {
            continue;
        }
        let parts: Vec<&str> = line.split_whitespace().collect();
        let bad = |msg: &str| Error::Parse {
            line: ln + 1,
            msg: msg.to_string(),
        };
        match header {
            None => {
                if parts.len() != 3 {
                    return Err(bad("expected 'rows cols nnz'"));
                }
                let p = |s: &str| s.parse::<usize>().map_err(|_| bad("bad size"));
                header = Some((p(parts[0])?, p(parts[1])?, p(parts[2])?));
            }
            Some((rows, cols, _)) => {
                if parts.len() != 3 {
                    return Err(bad("expected 'row col value'"));
                }
                let i: usize = parts[0].parse().map_err(|_| bad("bad row index"))?;
                let j: usize = parts[1].parse().map_err(|_| bad("bad column index"))?;
                let v: f64 = parts[2].parse().map_err(|_| bad("bad value"))?;
                if i == 0 || j == 0 || i > rows || j > cols {
                    return Err(bad("index out of range"));
                }
                triplets.push((i - 1, j - 1, v));
                if symmetric && i != j {
                    triplets.push((j - 1, i - 1, v));
                }
            }
        }
    }
    let (rows, cols, nnz) = header.ok_or(Error::Parse {
        line: 1,
        msg: "missing size line".into(),
    })?;
    let stored = if symmetric {
        triplets.iter().filter(|t| t.0 >= t.1).count()
    } else {
        triplets.len()
    };
    if stored != nnz {
        return Err(Error::Parse {
            line: 0,
            msg: format!("header declares {nnz} entries, found {stored}"),
        });
    }
    SparseMatrix::from_triplets(rows, cols, &triplets)
}

pub fn read_matrix_market(path: impl AsRef<Path>) -> Result<SparseMatrix> {
    parse_matrix_market(&fs::read_to_string(path)?)
}

pub fn write_dense_csv_string(a: &DenseMatrix) -> String {
    let mut out = String::from("rows,cols\n");
    let _ = writeln!(out, "{},{}", a.rows(), a.cols());
    for i in 0..a.rows() {
        let row: Vec<String> = (0..a.cols()).map(|j| format!("{:?}", a[(i, j)])).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub fn write_dense_csv(a: &DenseMatrix, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, write_dense_csv_string(a))?;
    Ok(())
}

pub fn parse_dense_csv(text: &str) -> Result<DenseMatrix> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    match lines.next() {
        Some((_, h)) if h.trim() == "rows,cols" => {}
        _ => {
            return Err(Error::Parse {
                line: 1,
                msg: "expected header 'rows,cols'".into(),
            })
        }
    }
    let (ln, dims) = lines.next().ok_or(Error::Parse {
        line: 2,
        msg: "missing dimensions".into(),
    })?;
    let d: Vec<usize> = dims
        .split(',')
        .map(|s| s.trim().parse::<usize>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| Error::Parse {
            line: ln + 1,
            msg: "bad dimensions".into(),
        })?;
    if d.len() != 2 {
        return Err(Error::Parse {
            line: ln + 1,
            msg: "expected 'rows,cols'".into(),
        });
    }
    let (rows, cols) = (d[0], d[1]);
    let mut row_major = Vec::with_capacity(rows * cols);
    for (ln, line) in lines {
        let vals: Vec<f64> = line
            .split(',')
            .map(|s| s.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::Parse {
                line: ln + 1,
                msg: "bad value".into(),
            })?;
        if vals.len() != cols {
            return Err(Error::Parse {
                line: ln + 1,
                msg: format!("expected {cols} values, found {}", vals.len()),
            });
        }
        row_major.extend(vals);
    }
    DenseMatrix::from_row_major(rows, cols, &row_major)
}

pub fn read_dense_csv(path: impl AsRef<Path>) -> Result<DenseMatrix> {
    parse_dense_csv(&fs::read_to_string(path)?)
}
