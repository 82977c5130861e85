//! Plain-text matrices and problem bundles.
//!
//! A matrix file starts with a `# rows cols` header followed by one
//! comma-separated row per line. A vector is a one-column matrix. A bundle
//! is a directory holding `Q.csv`, `x.csv`, `meta.json` and optionally
//! `strue.csv`.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BundleMeta {
    pub kappa: usize,
    #[serde(rename = "N", alias = "n")]
    pub n: usize,
    #[serde(rename = "L", alias = "l")]
    pub l: usize,
    pub seed: Option<u64>,
}

/// A problem read from disk; `q` is not yet validated or normalized.
#[derive(Debug, Clone, PartialEq)]
pub struct Bundle {
    pub q: DMatrix<f64>,
    pub x: DVector<f64>,
    pub s_true: Option<DVector<f64>>,
    pub meta: BundleMeta,
}

pub fn format_matrix(m: &DMatrix<f64>) -> String {
    let mut out = format!("# {} {}\n", m.nrows(), m.ncols());
    for row in m.row_iter() {
        let cells: Vec<String> = row.iter().map(|v| format!("{v:e}")).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

pub fn parse_matrix(text: &str) -> Result<DMatrix<f64>> {
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
    let header = lines
        .next()
        .and_then(|h| h.strip_prefix('#'))
        .ok_or_else(|| Error::Parse("missing `# rows cols` header".into()))?;
    let dims: Vec<usize> = header
        .split_whitespace()
        .map(|t| t.parse().map_err(|_| Error::Parse(format!("bad dimension `{t}`"))))
        .collect::<Result<_>>()?;
    let [rows, cols] = dims[..] else {
        return Err(Error::Parse("header needs exactly two dimensions".into()));
    };
    let mut data = Vec::with_capacity(rows * cols);
    let mut seen = 0;
    for line in lines {
        let before = data.len();
        for cell in line.split(',') {
            let cell = cell.trim();
            data.push(
                cell.parse::<f64>()
                    .map_err(|_| Error::Parse(format!("bad number `{cell}` on row {seen}")))?,
            );
        }
        if data.len() - before != cols {
            return Err(Error::Parse(format!("row {seen} has {} entries, expected {cols}", data.len() - before)));
        }
        seen += 1;
    }
    if seen != rows {
        return Err(Error::Parse(format!("found {seen} rows, expected {rows}")));
    }
    Ok(DMatrix::from_row_slice(rows, cols, &data))
}

pub fn parse_vector(text: &str) -> Result<DVector<f64>> {
    let m = parse_matrix(text)?;
    if m.ncols() != 1 {
        return Err(Error::Parse(format!("expected one column, found {}", m.ncols())));
    }
    Ok(m.column(0).into_owned())
}

pub fn format_vector(v: &DVector<f64>) -> String {
    format_matrix(&DMatrix::from_column_slice(v.len(), 1, v.as_slice()))
}

pub fn write_bundle(dir: &Path, bundle: &Bundle) -> Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join("Q.csv"), format_matrix(&bundle.q))?;
    fs::write(dir.join("x.csv"), format_vector(&bundle.x))?;
    if let Some(s) = &bundle.s_true {
        fs::write(dir.join("strue.csv"), format_vector(s))?;
    }
    let mut meta = serde_json::to_string_pretty(&bundle.meta)?;
    let _ = writeln!(meta);
    fs::write(dir.join("meta.json"), meta)?;
    Ok(())
}

pub fn read_bundle(dir: &Path) -> Result<Bundle> {
    let q = parse_matrix(&fs::read_to_string(dir.join("Q.csv"))?)?;
    let x = parse_vector(&fs::read_to_string(dir.join("x.csv"))?)?;
    let s_path = dir.join("strue.csv");
    let s_true = if s_path.exists() {
        Some(parse_vector(&fs::read_to_string(s_path)?)?)
    } else {
        None
    };
    let meta: BundleMeta = serde_json::from_str(&fs::read_to_string(dir.join("meta.json"))?)?;
    if (meta.n, meta.l) != q.shape() || x.len() != meta.n {
        return Err(Error::Parse(format!(
            "meta.json says {}x{}, files hold Q {}x{} and x of length {}",
            meta.n,
            meta.l,
            q.nrows(),
            q.ncols(),
            x.len()
        )));
    }
    if s_true.as_ref().is_some_and(|s| s.len() != meta.l) {
        return Err(Error::Parse("s_true length does not match L".into()));
    }
    Ok(Bundle { q, x, s_true, meta })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matrix_round_trip_is_exact() {
        let m = DMatrix::from_row_slice(2, 3, &[0.1, -2.5e-17, 3.0, 1.0 / 3.0, 0.0, -7.25]);
        assert_eq!(parse_matrix(&format_matrix(&m)).unwrap(), m);
    }

    #[test]
    fn malformed_matrices() {
        assert!(parse_matrix("1,2\n").is_err());
        assert!(parse_matrix("# 2 2\n1,2\n").is_err());
        assert!(parse_matrix("# 1 2\n1,2,3\n").is_err());
        assert!(parse_matrix("# 1 2\n1,x\n").is_err());
        assert!(parse_vector("# 1 2\n1,2\n").is_err());
    }

    #[test]
    fn bundle_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let bundle = Bundle {
            q: DMatrix::from_row_slice(2, 3, &[1.0, 0.0, 0.6, 0.0, 1.0, 0.8]),
            x: DVector::from_vec(vec![0.6, 0.8]),
            s_true: Some(DVector::from_vec(vec![0.0, 0.0, 1.0])),
            meta: BundleMeta { kappa: 1, n: 2, l: 3, seed: Some(4) },
        };
        write_bundle(dir.path(), &bundle).unwrap();
        assert_eq!(read_bundle(dir.path()).unwrap(), bundle);
    }
}
