//! MatrixMarket coordinate files and plain-text vectors.

use std::io::{BufRead, Write};

use crate::error::{Result, SaddleError};

use super::CsrMatrix;

/// Writes `m` as `%%MatrixMarket matrix coordinate real general`
/// with 1-based indices and 17 significant digits.
pub fn write_matrix_market<W: Write>(m: &CsrMatrix, mut w: W) -> Result<()> {
    writeln!(w, "%%MatrixMarket matrix coordinate real general")?;
    writeln!(w, "{} {} {}", m.rows(), m.cols(), m.nnz())?;
    for i in 0..m.rows() {
        let (cols, vals) = m.row(i);
        for (&j, &v) in cols.iter().zip(vals) {
            writeln!(w, "{} {} {:.16e}", i + 1, j + 1, v)?;
        }
    }
    Ok(())
}

/// Reads a real coordinate MatrixMarket file (`general` or `symmetric`).
pub fn read_matrix_market<R: BufRead>(r: R) -> Result<CsrMatrix> {
    let mut lines = r.lines();
    let header = lines
        .next()
        .ok_or_else(|| SaddleError::Parse("empty MatrixMarket input".into()))??;
    let tokens: Vec<String> = header.split_whitespace().map(|t| t.to_ascii_lowercase()).collect();
    if tokens.len() < 5 || tokens[0] != "%%matrixmarket" || tokens[1] != "matrix" || tokens[2] != "coordinate" {
        return Err(SaddleError::Parse(format!("unsupported header: {header}")));
    }
    if tokens[3] != "real" && tokens[3] != "integer" {
        return Err(SaddleError::Parse(format!("unsupported field type {}", tokens[3])));
    }
    let symmetric = match tokens[4].as_str() {
        "general" => false,
        "symmetric" => true,
        other => return Err(SaddleError::Parse(format!("unsupported symmetry {other}"))),
    };

    let mut size: Option<(usize, usize, usize)> = None;
    let mut triplets = Vec::new();
    for line in lines {
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('%') {
            continue;
        }
        let f: Vec<&str> = t.split_whitespace().collect();
        if size.is_none() {
            if f.len() != 3 {
                return Err(SaddleError::Parse(format!("bad size line: {t}")));
            }
            let p = |s: &str| s.parse::<usize>().map_err(|e| SaddleError::Parse(e.to_string()));
            let (r, c, n) = (p(f[0])?, p(f[1])?, p(f[2])?);
            triplets.reserve(if symmetric { 2 * n } else { n });
            size = Some((r, c, n));
            continue;
        }
        if f.len() != 3 {
            return Err(SaddleError::Parse(format!("bad entry line: {t}")));
        }
        let i: usize = f[0].parse().map_err(|e: std::num::ParseIntError| SaddleError::Parse(e.to_string()))?;
        let j: usize = f[1].parse().map_err(|e: std::num::ParseIntError| SaddleError::Parse(e.to_string()))?;
        let v: f64 = f[2].parse().map_err(|e: std::num::ParseFloatError| SaddleError::Parse(e.to_string()))?;
        if i == 0 || j == 0 {
            return Err(SaddleError::Parse("MatrixMarket indices are 1-based".into()));
        }
        triplets.push((i - 1, j - 1, v));
        if symmetric && i != j {
            triplets.push((j - 1, i - 1, v));
        }
    }
    let (rows, cols, nnz) = size.ok_or_else(|| SaddleError::Parse("missing size line".into()))?;
    let expected = triplets.len() - if symmetric { triplets.iter().filter(|t| t.0 > t.1).count() } else { 0 };
    if expected != nnz {
        return Err(SaddleError::Parse(format!("expected {nnz} entries, found {expected}")));
    }
    CsrMatrix::from_triplets(rows, cols, &triplets)
}

/// One value per line, 17 significant digits.
pub fn write_vector<W: Write>(v: &[f64], mut w: W) -> Result<()> {
    for x in v {
        writeln!(w, "{:.16e}", x)?;
    }
    Ok(())
}

pub fn read_vector<R: BufRead>(r: R) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for line in r.lines() {
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('%') || t.starts_with('#') {
            continue;
        }
        out.push(t.parse().map_err(|e: std::num::ParseFloatError| SaddleError::Parse(e.to_string()))?);
    }
    Ok(out)
}
