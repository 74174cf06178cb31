use crate::error::{Result, SaddleError};

use super::CsrMatrix;

/// Relative pivot tolerance: a pivot smaller than this times the largest
/// row norm of the input marks the matrix singular.
pub const PIVOT_TOLERANCE: f64 = 1e-14;

/// LU factors of a square dense matrix with partial (row) pivoting.
///
/// `L` (unit lower) and `U` are packed row-major in `lu`; `perm[k]` is the
/// original row that ended up in position `k`.
#[derive(Debug, Clone)]
pub struct DenseLu {
    n: usize,
    lu: Vec<f64>,
    perm: Vec<usize>,
}

impl DenseLu {
    /// Factors a row-major `n x n` matrix.
    pub fn factor(n: usize, values: &[f64], context: &str) -> Result<Self> {
        if values.len() != n * n {
            return Err(SaddleError::DimensionMismatch {
                op: "dense factorization",
                expected: n * n,
                got: values.len(),
            });
        }
        let mut lu = values.to_vec();
        let mut perm: Vec<usize> = (0..n).collect();
        let scale = (0..n)
            .map(|i| lu[i * n..(i + 1) * n].iter().map(|v| v.abs()).fold(0.0, f64::max))
            .fold(0.0, f64::max);
        let tol = PIVOT_TOLERANCE * scale;
        for k in 0..n {
            let mut piv = k;
            let mut best = lu[k * n + k].abs();
            for i in k + 1..n {
                let v = lu[i * n + k].abs();
                if v > best {
                    best = v;
                    piv = i;
                }
            }
            if !(best > tol) {
                return Err(SaddleError::Singular {
                    context: context.to_string(),
                    pivot: k,
                });
            }
            if piv != k {
                for j in 0..n {
                    lu.swap(k * n + j, piv * n + j);
                }
                perm.swap(k, piv);
            }
            let d = lu[k * n + k];
            for i in k + 1..n {
                let f = lu[i * n + k] / d;
                if f == 0.0 {
                    continue;
                }
                lu[i * n + k] = f;
                for j in k + 1..n {
                    lu[i * n + j] -= f * lu[k * n + j];
                }
            }
        }
        Ok(Self { n, lu, perm })
    }

    pub fn factor_sparse(m: &CsrMatrix, context: &str) -> Result<Self> {
        if m.rows() != m.cols() {
            return Err(SaddleError::DimensionMismatch {
                op: "dense factorization (square)",
                expected: m.rows(),
                got: m.cols(),
            });
        }
        Self::factor(m.rows(), &m.to_dense(), context)
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        if b.len() != self.n {
            return Err(SaddleError::DimensionMismatch {
                op: "dense solve",
                expected: self.n,
                got: b.len(),
            });
        }
        let mut x = vec![0.0; self.n];
        self.solve_into(b, &mut x);
        Ok(x)
    }

    /// Unchecked solve; `b` and `x` must have length `n`.
    pub fn solve_into(&self, b: &[f64], x: &mut [f64]) {
        let n = self.n;
        for k in 0..n {
            x[k] = b[self.perm[k]];
        }
        for i in 0..n {
            let row = &self.lu[i * n..i * n + i];
            let s: f64 = row.iter().zip(&x[..i]).map(|(l, y)| l * y).sum();
            x[i] -= s;
        }
        for i in (0..n).rev() {
            let row = &self.lu[i * n + i + 1..(i + 1) * n];
            let s: f64 = row.iter().zip(&x[i + 1..]).map(|(u, y)| u * y).sum();
            x[i] = (x[i] - s) / self.lu[i * n + i];
        }
    }
}

/// Solves with an existing factorization.
pub fn dense_solve(f: &DenseLu, b: &[f64]) -> Result<Vec<f64>> {
    f.solve(b)
}
