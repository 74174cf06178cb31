use crate::error::{Result, SaddleError};

/// Compressed sparse row matrix of `f64`.
///
/// Column indices are strictly increasing within each row and no entry
/// equal to `0.0` is ever stored.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    rows: usize,
    cols: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    data: Vec<f64>,
}

impl CsrMatrix {
    /// Builds a matrix from raw CSR arrays, validating the structure.
    pub fn new(
        rows: usize,
        cols: usize,
        indptr: Vec<usize>,
        indices: Vec<usize>,
        data: Vec<f64>,
    ) -> Result<Self> {
        if indptr.len() != rows + 1 {
            return Err(SaddleError::DimensionMismatch {
                op: "csr indptr",
                expected: rows + 1,
                got: indptr.len(),
            });
        }
        if indices.len() != data.len() || indptr[rows] != data.len() {
            return Err(SaddleError::DimensionMismatch {
                op: "csr data",
                expected: indptr[rows],
                got: data.len(),
            });
        }
        for i in 0..rows {
            if indptr[i] > indptr[i + 1] {
                return Err(SaddleError::Parse(format!("row pointer decreases at row {i}")));
            }
            let cols_i = &indices[indptr[i]..indptr[i + 1]];
            for w in cols_i.windows(2) {
                if w[0] >= w[1] {
                    return Err(SaddleError::Parse(format!(
                        "column indices not strictly increasing in row {i}"
                    )));
                }
            }
            if let Some(&last) = cols_i.last() {
                if last >= cols {
                    return Err(SaddleError::DimensionMismatch {
                        op: "csr column index",
                        expected: cols,
                        got: last,
                    });
                }
            }
        }
        let mut m = Self {
            rows,
            cols,
            indptr,
            indices,
            data,
        };
        m.prune_zeros();
        Ok(m)
    }

    /// Builds a matrix from `(row, col, value)` triplets. Duplicates are summed
    /// in input order, so the result is deterministic.
    pub fn from_triplets(rows: usize, cols: usize, triplets: &[(usize, usize, f64)]) -> Result<Self> {
        let mut counts = vec![0usize; rows + 1];
        for &(i, j, _) in triplets {
            if i >= rows {
                return Err(SaddleError::DimensionMismatch {
                    op: "triplet row",
                    expected: rows,
                    got: i,
                });
            }
            if j >= cols {
                return Err(SaddleError::DimensionMismatch {
                    op: "triplet column",
                    expected: cols,
                    got: j,
                });
            }
            counts[i + 1] += 1;
        }
        for i in 0..rows {
            counts[i + 1] += counts[i];
        }
        // bucket by row, keeping input order inside each row
        let mut next = counts.clone();
        let mut cols_tmp = vec![0usize; triplets.len()];
        let mut vals_tmp = vec![0.0; triplets.len()];
        for &(i, j, v) in triplets {
            let k = next[i];
            cols_tmp[k] = j;
            vals_tmp[k] = v;
            next[i] += 1;
        }
        let mut indptr = Vec::with_capacity(rows + 1);
        let mut indices = Vec::with_capacity(triplets.len());
        let mut data = Vec::with_capacity(triplets.len());
        indptr.push(0);
        let mut order: Vec<usize> = Vec::new();
        for i in 0..rows {
            let (lo, hi) = (counts[i], counts[i + 1]);
            order.clear();
            order.extend(lo..hi);
            order.sort_by_key(|&k| cols_tmp[k]);
            let mut last: Option<usize> = None;
            for &k in &order {
                if last == Some(cols_tmp[k]) {
                    *data.last_mut().unwrap() += vals_tmp[k];
                } else {
                    indices.push(cols_tmp[k]);
                    data.push(vals_tmp[k]);
                    last = Some(cols_tmp[k]);
                }
            }
            indptr.push(indices.len());
        }
        let mut m = Self {
            rows,
            cols,
            indptr,
            indices,
            data,
        };
        m.prune_zeros();
        Ok(m)
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            indptr: vec![0; rows + 1],
            indices: Vec::new(),
            data: Vec::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_diagonal(&vec![1.0; n])
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        let mut indptr = Vec::with_capacity(n + 1);
        let mut indices = Vec::with_capacity(n);
        let mut data = Vec::with_capacity(n);
        indptr.push(0);
        for (i, &v) in diag.iter().enumerate() {
            if v != 0.0 {
                indices.push(i);
                data.push(v);
            }
            indptr.push(indices.len());
        }
        Self {
            rows: n,
            cols: n,
            indptr,
            indices,
            data,
        }
    }

    /// Dense row-major input; exact zeros are skipped.
    pub fn from_dense(rows: usize, cols: usize, values: &[f64]) -> Self {
        assert_eq!(values.len(), rows * cols);
        let mut indptr = vec![0];
        let mut indices = Vec::new();
        let mut data = Vec::new();
        for i in 0..rows {
            for j in 0..cols {
                let v = values[i * cols + j];
                if v != 0.0 {
                    indices.push(j);
                    data.push(v);
                }
            }
            indptr.push(indices.len());
        }
        Self {
            rows,
            cols,
            indptr,
            indices,
            data,
        }
    }

    fn prune_zeros(&mut self) {
        if !self.data.iter().any(|&v| v == 0.0) {
            return;
        }
        let mut w = 0;
        let mut start = 0;
        for i in 0..self.rows {
            let end = self.indptr[i + 1];
            for k in start..end {
                if self.data[k] != 0.0 {
                    self.indices[w] = self.indices[k];
                    self.data[w] = self.data[k];
                    w += 1;
                }
            }
            start = end;
            self.indptr[i + 1] = w;
        }
        self.indices.truncate(w);
        self.data.truncate(w);
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.data.len()
    }

    pub fn indptr(&self) -> &[usize] {
        &self.indptr
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    /// Column indices and values of row `i`.
    #[inline]
    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let (lo, hi) = (self.indptr[i], self.indptr[i + 1]);
        (&self.indices[lo..hi], &self.data[lo..hi])
    }

    #[inline]
    pub fn row_nnz(&self, i: usize) -> usize {
        self.indptr[i + 1] - self.indptr[i]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (cols, vals) = self.row(i);
        match cols.binary_search(&j) {
            Ok(k) => vals[k],
            Err(_) => 0.0,
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).collect()
    }

    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.rows).map(|i| self.row(i).1.iter().sum()).collect()
    }

    /// `y = M x`.
    pub fn spmv(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut y = vec![0.0; self.rows];
        self.spmv_into(x, &mut y)?;
        Ok(y)
    }

    pub fn spmv_into(&self, x: &[f64], y: &mut [f64]) -> Result<()> {
        if x.len() != self.cols {
            return Err(SaddleError::DimensionMismatch {
                op: "spmv input",
                expected: self.cols,
                got: x.len(),
            });
        }
        if y.len() != self.rows {
            return Err(SaddleError::DimensionMismatch {
                op: "spmv output",
                expected: self.rows,
                got: y.len(),
            });
        }
        self.apply(x, y);
        Ok(())
    }

    /// Unchecked `y = M x`; callers guarantee the sizes.
    #[inline]
    pub fn apply(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            let (cols, vals) = self.row(i);
            let mut s = 0.0;
            for (&j, &v) in cols.iter().zip(vals) {
                s += v * x[j];
            }
            *yi = s;
        }
    }

    /// `y += alpha * M x`.
    #[inline]
    pub fn apply_add(&self, alpha: f64, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            let (cols, vals) = self.row(i);
            let mut s = 0.0;
            for (&j, &v) in cols.iter().zip(vals) {
                s += v * x[j];
            }
            *yi += alpha * s;
        }
    }

    /// Row-wise dot product `(M x)_i`.
    #[inline]
    pub fn row_dot(&self, i: usize, x: &[f64]) -> f64 {
        let (cols, vals) = self.row(i);
        cols.iter().zip(vals).map(|(&j, &v)| v * x[j]).sum()
    }

    pub fn transpose(&self) -> CsrMatrix {
        let mut counts = vec![0usize; self.cols + 1];
        for &j in &self.indices {
            counts[j + 1] += 1;
        }
        for j in 0..self.cols {
            counts[j + 1] += counts[j];
        }
        let mut next = counts.clone();
        let mut indices = vec![0usize; self.nnz()];
        let mut data = vec![0.0; self.nnz()];
        for i in 0..self.rows {
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                let k = next[j];
                indices[k] = i;
                data[k] = v;
                next[j] += 1;
            }
        }
        CsrMatrix {
            rows: self.cols,
            cols: self.rows,
            indptr: counts,
            indices,
            data,
        }
    }

    /// Sparse product `self * other` (row-by-row accumulation).
    pub fn matmul(&self, other: &CsrMatrix) -> Result<CsrMatrix> {
        if self.cols != other.rows {
            return Err(SaddleError::DimensionMismatch {
                op: "matmul",
                expected: self.cols,
                got: other.rows,
            });
        }
        let n = other.cols;
        let mut marker = vec![usize::MAX; n];
        let mut acc = vec![0.0; n];
        let mut indptr = Vec::with_capacity(self.rows + 1);
        let mut indices = Vec::new();
        let mut data = Vec::new();
        let mut row_cols: Vec<usize> = Vec::new();
        indptr.push(0);
        for i in 0..self.rows {
            row_cols.clear();
            let (a_cols, a_vals) = self.row(i);
            for (&k, &a) in a_cols.iter().zip(a_vals) {
                let (b_cols, b_vals) = other.row(k);
                for (&j, &b) in b_cols.iter().zip(b_vals) {
                    if marker[j] != i {
                        marker[j] = i;
                        acc[j] = a * b;
                        row_cols.push(j);
                    } else {
                        acc[j] += a * b;
                    }
                }
            }
            row_cols.sort_unstable();
            for &j in &row_cols {
                if acc[j] != 0.0 {
                    indices.push(j);
                    data.push(acc[j]);
                }
            }
            indptr.push(indices.len());
        }
        Ok(CsrMatrix {
            rows: self.rows,
            cols: n,
            indptr,
            indices,
            data,
        })
    }

    /// `alpha * self + beta * other`.
    pub fn add_scaled(&self, alpha: f64, other: &CsrMatrix, beta: f64) -> Result<CsrMatrix> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(SaddleError::DimensionMismatch {
                op: "add",
                expected: self.rows * self.cols,
                got: other.rows * other.cols,
            });
        }
        let mut indptr = Vec::with_capacity(self.rows + 1);
        let mut indices = Vec::with_capacity(self.nnz() + other.nnz());
        let mut data = Vec::with_capacity(self.nnz() + other.nnz());
        indptr.push(0);
        for i in 0..self.rows {
            let (ac, av) = self.row(i);
            let (bc, bv) = other.row(i);
            let (mut p, mut q) = (0, 0);
            while p < ac.len() || q < bc.len() {
                let (j, v) = if q >= bc.len() || (p < ac.len() && ac[p] < bc[q]) {
                    p += 1;
                    (ac[p - 1], alpha * av[p - 1])
                } else if p >= ac.len() || bc[q] < ac[p] {
                    q += 1;
                    (bc[q - 1], beta * bv[q - 1])
                } else {
                    p += 1;
                    q += 1;
                    (ac[p - 1], alpha * av[p - 1] + beta * bv[q - 1])
                };
                if v != 0.0 {
                    indices.push(j);
                    data.push(v);
                }
            }
            indptr.push(indices.len());
        }
        Ok(CsrMatrix {
            rows: self.rows,
            cols: self.cols,
            indptr,
            indices,
            data,
        })
    }

    pub fn scale(&self, alpha: f64) -> CsrMatrix {
        let mut m = self.clone();
        m.data.iter_mut().for_each(|v| *v *= alpha);
        m.prune_zeros();
        m
    }

    /// `diag(left) * self * diag(right)`.
    pub fn scale_rows_cols(&self, left: Option<&[f64]>, right: Option<&[f64]>) -> CsrMatrix {
        let mut m = self.clone();
        for i in 0..m.rows {
            let (lo, hi) = (m.indptr[i], m.indptr[i + 1]);
            for k in lo..hi {
                let mut v = m.data[k];
                if let Some(l) = left {
                    v *= l[i];
                }
                if let Some(r) = right {
                    v *= r[m.indices[k]];
                }
                m.data[k] = v;
            }
        }
        m.prune_zeros();
        m
    }

    /// Keeps the listed rows (in the given order).
    pub fn select_rows(&self, rows: &[usize]) -> CsrMatrix {
        let mut indptr = vec![0];
        let mut indices = Vec::new();
        let mut data = Vec::new();
        for &i in rows {
            let (c, v) = self.row(i);
            indices.extend_from_slice(c);
            data.extend_from_slice(v);
            indptr.push(indices.len());
        }
        CsrMatrix {
            rows: rows.len(),
            cols: self.cols,
            indptr,
            indices,
            data,
        }
    }

    /// Extracts the sub-block with rows in `row_range` and columns in
    /// `col_range`, re-indexed from zero.
    pub fn block(&self, row_range: std::ops::Range<usize>, col_range: std::ops::Range<usize>) -> CsrMatrix {
        let mut indptr = vec![0];
        let mut indices = Vec::new();
        let mut data = Vec::new();
        for i in row_range.clone() {
            let (c, v) = self.row(i);
            for (&j, &x) in c.iter().zip(v) {
                if col_range.contains(&j) {
                    indices.push(j - col_range.start);
                    data.push(x);
                }
            }
            indptr.push(indices.len());
        }
        CsrMatrix {
            rows: row_range.len(),
            cols: col_range.len(),
            indptr,
            indices,
            data,
        }
    }

    /// Assembles a 2x2 block matrix `[[a, b], [c, d]]`; `None` is a zero block.
    pub fn from_blocks(
        a: &CsrMatrix,
        b: Option<&CsrMatrix>,
        c: Option<&CsrMatrix>,
        d: Option<&CsrMatrix>,
        lower_rows: usize,
        right_cols: usize,
    ) -> CsrMatrix {
        let (n0, m0) = (a.rows, a.cols);
        let mut indptr = vec![0];
        let mut indices = Vec::new();
        let mut data = Vec::new();
        for i in 0..n0 {
            let (ac, av) = a.row(i);
            indices.extend_from_slice(ac);
            data.extend_from_slice(av);
            if let Some(b) = b {
                let (bc, bv) = b.row(i);
                indices.extend(bc.iter().map(|&j| j + m0));
                data.extend_from_slice(bv);
            }
            indptr.push(indices.len());
        }
        for i in 0..lower_rows {
            if let Some(c) = c {
                let (cc, cv) = c.row(i);
                indices.extend_from_slice(cc);
                data.extend_from_slice(cv);
            }
            if let Some(d) = d {
                let (dc, dv) = d.row(i);
                indices.extend(dc.iter().map(|&j| j + m0));
                data.extend_from_slice(dv);
            }
            indptr.push(indices.len());
        }
        CsrMatrix {
            rows: n0 + lower_rows,
            cols: m0 + right_cols,
            indptr,
            indices,
            data,
        }
    }

    /// Largest `|M_ij - M_ji|`, relative to the largest `|M_ij|`.
    pub fn relative_asymmetry(&self) -> f64 {
        let t = self.transpose();
        let mut max_diff = 0.0f64;
        let mut max_abs = 0.0f64;
        for i in 0..self.rows {
            let (c, v) = self.row(i);
            for (&j, &x) in c.iter().zip(v) {
                max_abs = max_abs.max(x.abs());
                max_diff = max_diff.max((x - t.get(i, j)).abs());
            }
            let (tc, tv) = t.row(i);
            for (&j, &x) in tc.iter().zip(tv) {
                max_diff = max_diff.max((x - self.get(i, j)).abs());
            }
        }
        if max_abs == 0.0 {
            0.0
        } else {
            max_diff / max_abs
        }
    }

    /// `(M + Mᵀ) / 2`.
    pub fn symmetrize(&self) -> CsrMatrix {
        let t = self.transpose();
        self.add_scaled(0.5, &t, 0.5).expect("square matrix")
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// Row-major dense copy; intended for small matrices and tests.
    pub fn to_dense(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.rows * self.cols];
        for i in 0..self.rows {
            let (c, v) = self.row(i);
            for (&j, &x) in c.iter().zip(v) {
                out[i * self.cols + j] = x;
            }
        }
        out
    }
}

/// General triple product `R M P`.
pub fn triple_product(r: &CsrMatrix, m: &CsrMatrix, p: &CsrMatrix) -> Result<CsrMatrix> {
    if r.cols() != m.rows() || m.cols() != p.rows() {
        return Err(SaddleError::DimensionMismatch {
            op: "triple product",
            expected: m.rows(),
            got: r.cols(),
        });
    }
    r.matmul(&m.matmul(p)?)
}

/// Galerkin product `Pᵀ M P` for symmetric `M`. The result is checked for
/// roundoff asymmetry (at most 1e-10 relative) and then symmetrized.
pub fn galerkin_product(p: &CsrMatrix, m: &CsrMatrix) -> Result<CsrMatrix> {
    let coarse = triple_product(&p.transpose(), m, p)?;
    let asym = coarse.relative_asymmetry();
    if asym > 1e-10 {
        return Err(SaddleError::NotSymmetric {
            context: "Galerkin product".into(),
            asymmetry: asym,
        });
    }
    Ok(coarse.symmetrize())
}

/// Inverse of the lumped (row-sum) diagonal.
pub fn lumped_inverse_diag(m: &CsrMatrix) -> Result<Vec<f64>> {
    m.row_sums()
        .into_iter()
        .enumerate()
        .map(|(i, s)| {
            if s > 0.0 {
                Ok(1.0 / s)
            } else {
                Err(SaddleError::NonPositive {
                    what: "lumped row sum",
                    index: i,
                    value: s,
                })
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn laplace_1d(n: usize) -> CsrMatrix {
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, 2.0));
            if i > 0 {
                t.push((i, i - 1, -1.0));
            }
            if i + 1 < n {
                t.push((i, i + 1, -1.0));
            }
        }
        CsrMatrix::from_triplets(n, n, &t).unwrap()
    }

    #[test]
    fn spmv_identity_and_laplace() {
        let x = vec![0.5, -2.0, 3.25];
        assert_eq!(CsrMatrix::identity(3).spmv(&x).unwrap(), x);
        assert_eq!(laplace_1d(3).spmv(&[1.0, 1.0, 1.0]).unwrap(), vec![1.0, 0.0, 1.0]);
        assert_eq!(CsrMatrix::zeros(3, 3).spmv(&x).unwrap(), vec![0.0; 3]);
    }

    #[test]
    fn spmv_rejects_bad_sizes() {
        assert!(matches!(
            laplace_1d(3).spmv(&[1.0, 2.0]),
            Err(SaddleError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn triplets_sum_duplicates_and_prune_zeros() {
        let m = CsrMatrix::from_triplets(2, 2, &[(0, 1, 1.0), (0, 1, -1.0), (1, 0, 2.0), (1, 0, 0.5)]).unwrap();
        assert_eq!(m.nnz(), 1);
        assert_eq!(m.get(1, 0), 2.5);
        assert_eq!(m.get(0, 1), 0.0);
    }

    #[test]
    fn new_rejects_unsorted_columns() {
        assert!(CsrMatrix::new(1, 3, vec![0, 2], vec![2, 1], vec![1.0, 1.0]).is_err());
    }

    #[test]
    fn transpose_shapes() {
        assert_eq!(CsrMatrix::identity(4).transpose(), CsrMatrix::identity(4));
        let row = CsrMatrix::from_dense(1, 3, &[1.0, 2.0, 3.0]);
        let col = row.transpose();
        assert_eq!((col.rows(), col.cols()), (3, 1));
        assert_eq!(col.to_dense(), vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn triple_product_with_identity_is_identity_map() {
        let m = laplace_1d(5);
        let i = CsrMatrix::identity(5);
        assert_eq!(triple_product(&i, &m, &i).unwrap(), m);
    }

    #[test]
    fn lumped_inverse() {
        assert_eq!(lumped_inverse_diag(&CsrMatrix::identity(3)).unwrap(), vec![1.0; 3]);
        let d = CsrMatrix::from_diagonal(&[2.0, 4.0]);
        assert_eq!(lumped_inverse_diag(&d).unwrap(), vec![0.5, 0.25]);
        assert!(lumped_inverse_diag(&laplace_1d(3).scale(-1.0)).is_err());
    }

    #[test]
    fn blocks_round_trip() {
        let a = laplace_1d(3);
        let b = CsrMatrix::from_dense(2, 3, &[1.0, 0.0, -1.0, 0.0, 2.0, 0.0]);
        let bt = b.transpose();
        let c = CsrMatrix::from_diagonal(&[0.5, 0.25]);
        let full = CsrMatrix::from_blocks(&a, Some(&bt), Some(&b), Some(&c), 2, 2);
        assert_eq!(full.block(0..3, 0..3), a);
        assert_eq!(full.block(3..5, 0..3), b);
        assert_eq!(full.block(0..3, 3..5), bt);
        assert_eq!(full.block(3..5, 3..5), c);
    }
}
