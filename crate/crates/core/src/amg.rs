//! Classical Ruge-Stüben algebraic multigrid for SPD matrices.
//!
//! Strength of connection only looks at negative off-diagonals; positive
//! couplings (as in RT0 mass matrices) are always weak and get lumped
//! into the diagonal during interpolation.

use std::cmp::Reverse;
use std::collections::BTreeSet;
use std::io::Write;

use serde::Serialize;

use crate::error::{Result, SaddleError};
use crate::sparse::{galerkin_product, CsrMatrix, DenseLu};

/// Default strength threshold.
pub const THETA: f64 = 0.25;
/// Levels with at most this many unknowns are solved directly.
pub const MAX_COARSE: usize = 1000;
/// Interpolation weights below this fraction of the row maximum are dropped.
pub const TRUNCATION: f64 = 1.0 / 20.0;
const STALL_FRACTION: f64 = 0.95;
const MAX_LEVELS: usize = 40;

/// Strong dependencies `S_i` of each row.
#[derive(Debug, Clone, PartialEq)]
pub struct StrengthGraph {
    pub theta: f64,
    indptr: Vec<usize>,
    indices: Vec<usize>,
}

impl StrengthGraph {
    pub fn len(&self) -> usize {
        self.indptr.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn strong(&self, i: usize) -> &[usize] {
        &self.indices[self.indptr[i]..self.indptr[i + 1]]
    }

    /// Points that depend strongly on each point (`S_i^T`).
    fn transpose(&self) -> (Vec<usize>, Vec<usize>) {
        let n = self.len();
        let mut count = vec![0usize; n + 1];
        for &j in &self.indices {
            count[j + 1] += 1;
        }
        for i in 0..n {
            count[i + 1] += count[i];
        }
        let mut next = count.clone();
        let mut idx = vec![0; self.indices.len()];
        for i in 0..n {
            for &j in self.strong(i) {
                idx[next[j]] = i;
                next[j] += 1;
            }
        }
        (count, idx)
    }
}

/// `j` is strong for `i` iff `-a_ij >= theta * max_k(-a_ik)` and that
/// maximum is positive.
pub fn strength_connections(m: &CsrMatrix, theta: f64) -> StrengthGraph {
    let mut indptr = vec![0];
    let mut indices = Vec::new();
    for i in 0..m.rows() {
        let (cols, vals) = m.row(i);
        let max_neg = cols
            .iter()
            .zip(vals)
            .filter(|(&j, _)| j != i)
            .fold(0.0f64, |acc, (_, &v)| acc.max(-v));
        if max_neg > 0.0 {
            let cut = theta * max_neg;
            for (&j, &v) in cols.iter().zip(vals) {
                if j != i && -v >= cut {
                    indices.push(j);
                }
            }
        }
        indptr.push(indices.len());
    }
    StrengthGraph { theta, indptr, indices }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PointType {
    C,
    F,
}

/// C/F labels and the coarse numbering of C points.
#[derive(Debug, Clone, PartialEq)]
pub struct CfSplit {
    pub labels: Vec<PointType>,
    coarse_index: Vec<usize>,
    n_coarse: usize,
}

impl CfSplit {
    fn from_labels(labels: Vec<PointType>) -> Self {
        let mut n_coarse = 0;
        let coarse_index = labels
            .iter()
            .map(|&l| {
                if l == PointType::C {
                    n_coarse += 1;
                    n_coarse - 1
                } else {
                    usize::MAX
                }
            })
            .collect();
        CfSplit {
            labels,
            coarse_index,
            n_coarse,
        }
    }

    /// Split from explicit coarse flags.
    pub fn from_coarse_flags(coarse: &[bool]) -> Self {
        Self::from_labels(coarse.iter().map(|&c| if c { PointType::C } else { PointType::F }).collect())
    }

    pub fn n_coarse(&self) -> usize {
        self.n_coarse
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn is_coarse(&self, i: usize) -> bool {
        self.labels[i] == PointType::C
    }

    pub fn coarse_index(&self, i: usize) -> Option<usize> {
        self.is_coarse(i).then(|| self.coarse_index[i])
    }

    pub fn coarse_fraction(&self) -> f64 {
        if self.labels.is_empty() {
            0.0
        } else {
            self.n_coarse as f64 / self.labels.len() as f64
        }
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Mark {
    Undecided,
    C,
    F,
}

/// Serial Ruge-Stüben coarsening: greedy first pass by measure `|S_i^T|`
/// (ties to the lowest index), then a second pass that makes sure strongly
/// connected F points share a C point.
pub fn rs_coarsen(s: &StrengthGraph) -> CfSplit {
    let n = s.len();
    let (tp, ti) = s.transpose();
    let influences = |i: usize| &ti[tp[i]..tp[i + 1]];
    let mut measure: Vec<usize> = (0..n).map(|i| tp[i + 1] - tp[i]).collect();
    let mut mark = vec![Mark::Undecided; n];
    let mut queue = BTreeSet::new();
    for i in 0..n {
        if measure[i] == 0 && s.strong(i).is_empty() {
            mark[i] = Mark::F;
        } else {
            queue.insert((Reverse(measure[i]), i));
        }
    }
    while let Some((Reverse(m), i)) = queue.pop_first() {
        if m == 0 {
            // nothing left depends on these; they interpolate or get fixed below
            mark[i] = Mark::F;
            for (_, k) in std::mem::take(&mut queue) {
                mark[k] = Mark::F;
            }
            break;
        }
        mark[i] = Mark::C;
        for &j in influences(i) {
            if mark[j] != Mark::Undecided {
                continue;
            }
            queue.remove(&(Reverse(measure[j]), j));
            mark[j] = Mark::F;
            for &k in s.strong(j) {
                if mark[k] == Mark::Undecided {
                    queue.remove(&(Reverse(measure[k]), k));
                    measure[k] += 1;
                    queue.insert((Reverse(measure[k]), k));
                }
            }
        }
        for &k in s.strong(i) {
            if mark[k] == Mark::Undecided && measure[k] > 0 {
                queue.remove(&(Reverse(measure[k]), k));
                measure[k] -= 1;
                queue.insert((Reverse(measure[k]), k));
            }
        }
    }

    // second pass
    let mut tag = vec![usize::MAX; n];
    for i in 0..n {
        if mark[i] != Mark::F || s.strong(i).is_empty() {
            continue;
        }
        for &k in s.strong(i) {
            if mark[k] == Mark::C {
                tag[k] = i;
            }
        }
        let mut tentative: Option<usize> = None;
        let mut promote_self = false;
        for &j in s.strong(i) {
            if mark[j] != Mark::F {
                continue;
            }
            if s.strong(j).iter().any(|&k| tag[k] == i) {
                continue;
            }
            if tentative.is_none() {
                tentative = Some(j);
                tag[j] = i;
            } else {
                promote_self = true;
                break;
            }
        }
        if promote_self {
            if let Some(j) = tentative {
                tag[j] = usize::MAX;
            }
            mark[i] = Mark::C;
        } else if let Some(j) = tentative {
            mark[j] = Mark::C;
        } else if !s.strong(i).iter().any(|&k| mark[k] == Mark::C) {
            mark[i] = Mark::C;
        }
    }
    CfSplit::from_labels(
        mark.into_iter()
            .map(|m| if m == Mark::C { PointType::C } else { PointType::F })
            .collect(),
    )
}

/// Drops weights with `|w| < TRUNCATION * max|w|` and rescales the survivors
/// to keep the row sum. Works in place on `(column, weight)` pairs.
pub fn truncate_row(row: &mut Vec<(usize, f64)>) {
    let max = row.iter().fold(0.0f64, |m, &(_, w)| m.max(w.abs()));
    if max == 0.0 {
        row.clear();
        return;
    }
    let before: f64 = row.iter().map(|&(_, w)| w).sum();
    row.retain(|&(_, w)| w.abs() >= TRUNCATION * max);
    let after: f64 = row.iter().map(|&(_, w)| w).sum();
    if after != 0.0 && before != after {
        let s = before / after;
        for e in row.iter_mut() {
            e.1 *= s;
        }
    }
}

/// Modified classical interpolation with truncation. Rows of C points are
/// unit rows; F points without strong connections get empty rows.
pub fn build_interpolation(m: &CsrMatrix, s: &StrengthGraph, split: &CfSplit) -> Result<CsrMatrix> {
    let n = m.rows();
    let mut indptr = vec![0];
    let mut indices = Vec::new();
    let mut data = Vec::new();
    // slot[j] = position of coarse neighbour j in the current row buffer
    let mut slot = vec![usize::MAX; n];
    let mut strong_mark = vec![usize::MAX; n];
    let mut row: Vec<(usize, f64)> = Vec::new();
    for i in 0..n {
        if let Some(c) = split.coarse_index(i) {
            indices.push(c);
            data.push(1.0);
            indptr.push(indices.len());
            continue;
        }
        let strong = s.strong(i);
        if strong.is_empty() {
            indptr.push(indices.len());
            continue;
        }
        row.clear();
        let mut ci = Vec::new();
        for &j in strong {
            strong_mark[j] = i;
            if split.is_coarse(j) {
                slot[j] = ci.len();
                ci.push(j);
                row.push((j, 0.0));
            }
        }
        if ci.is_empty() {
            return Err(SaddleError::NoInterpolatorySet { point: i });
        }
        let (cols, vals) = m.row(i);
        let mut diag = 0.0;
        for (&j, &a) in cols.iter().zip(vals) {
            if j == i {
                diag += a;
            } else if strong_mark[j] != i {
                diag += a;
            } else if split.is_coarse(j) {
                row[slot[j]].1 += a;
            } else {
                // strong F neighbour k = j: distribute through common C points
                let (kc, kv) = m.row(j);
                let denom: f64 = kc
                    .iter()
                    .zip(kv)
                    .filter(|(&l, &v)| v < 0.0 && l != j && strong_mark[l] == i && split.is_coarse(l))
                    .map(|(_, &v)| v)
                    .sum();
                if denom == 0.0 {
                    diag += a;
                    continue;
                }
                for (&l, &v) in kc.iter().zip(kv) {
                    if v < 0.0 && l != j && strong_mark[l] == i && split.is_coarse(l) {
                        row[slot[l]].1 += a * v / denom;
                    }
                }
            }
        }
        for e in row.iter_mut() {
            e.1 = -e.1 / diag;
        }
        for &j in &ci {
            slot[j] = usize::MAX;
        }
        truncate_row(&mut row);
        let mut entries: Vec<(usize, f64)> = row
            .iter()
            .filter(|e| e.1 != 0.0)
            .map(|&(j, w)| (split.coarse_index[j], w))
            .collect();
        entries.sort_unstable_by_key(|e| e.0);
        for (c, w) in entries {
            indices.push(c);
            data.push(w);
        }
        indptr.push(indices.len());
    }
    CsrMatrix::new(n, split.n_coarse(), indptr, indices, data)
}

/// One coarsening step: strength, split and interpolation.
pub fn coarsen_step(m: &CsrMatrix, theta: f64) -> Result<(CfSplit, CsrMatrix)> {
    let s = strength_connections(m, theta);
    let split = rs_coarsen(&s);
    let p = build_interpolation(m, &s, &split)?;
    Ok((split, p))
}

#[derive(Debug, Clone)]
pub struct AmgLevel {
    pub matrix: CsrMatrix,
    pub interp: CsrMatrix,
    restrict: CsrMatrix,
    diag: Vec<f64>,
    pub split: CfSplit,
}

#[derive(Debug, Clone)]
enum CoarseSolve {
    Dense(DenseLu),
    /// Degenerate coarsest level too large to factor but without strong
    /// couplings: a few Gauss-Seidel sweeps.
    Relax(Vec<f64>),
}

/// Galerkin hierarchy with a direct solve on the coarsest level.
#[derive(Debug, Clone)]
pub struct AmgHierarchy {
    levels: Vec<AmgLevel>,
    coarse_matrix: CsrMatrix,
    coarse: CoarseSolve,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct AmgLevelStats {
    pub level: usize,
    pub n: usize,
    pub nnz: usize,
    pub coarse_fraction: f64,
    pub operator_complexity: f64,
}

fn positive_diagonal(m: &CsrMatrix, what: &'static str) -> Result<Vec<f64>> {
    let d = m.diagonal();
    for (i, &v) in d.iter().enumerate() {
        if !(v > 0.0) {
            return Err(SaddleError::NonPositive { what, index: i, value: v });
        }
    }
    Ok(d)
}

/// Builds the hierarchy; `m` must be symmetric.
pub fn amg_setup(m: &CsrMatrix, theta: f64) -> Result<AmgHierarchy> {
    let asym = m.relative_asymmetry();
    if asym > 1e-10 {
        return Err(SaddleError::NotSymmetric {
            context: "AMG input".into(),
            asymmetry: asym,
        });
    }
    let mut levels = Vec::new();
    let mut current = m.clone();
    let mut high_fraction = 0;
    while current.rows() > MAX_COARSE && levels.len() < MAX_LEVELS {
        let (split, p) = coarsen_step(&current, theta)?;
        if split.n_coarse() == 0 {
            break;
        }
        let frac = split.coarse_fraction();
        if frac > STALL_FRACTION {
            high_fraction += 1;
            if high_fraction >= 2 {
                return Err(SaddleError::CoarseningStall {
                    level: levels.len(),
                    fraction: frac,
                });
            }
        } else {
            high_fraction = 0;
        }
        let coarse = galerkin_product(&p, &current)?;
        let diag = positive_diagonal(&current, "AMG diagonal")?;
        levels.push(AmgLevel {
            restrict: p.transpose(),
            matrix: current,
            interp: p,
            diag,
            split,
        });
        current = coarse;
    }
    let coarse = if current.rows() <= MAX_COARSE {
        CoarseSolve::Dense(DenseLu::factor_sparse(
            &current,
            &format!("AMG coarse level {}", levels.len()),
        )?)
    } else {
        CoarseSolve::Relax(positive_diagonal(&current, "AMG coarse diagonal")?)
    };
    Ok(AmgHierarchy {
        levels,
        coarse_matrix: current,
        coarse,
    })
}

fn gauss_seidel(m: &CsrMatrix, diag: &[f64], b: &[f64], x: &mut [f64], forward: bool) {
    let n = m.rows();
    let mut step = |i: usize| {
        let (cols, vals) = m.row(i);
        let mut s = b[i];
        for (&j, &v) in cols.iter().zip(vals) {
            if j != i {
                s -= v * x[j];
            }
        }
        x[i] = s / diag[i];
    };
    if forward {
        (0..n).for_each(&mut step);
    } else {
        (0..n).rev().for_each(&mut step);
    }
}

fn residual(m: &CsrMatrix, b: &[f64], x: &[f64]) -> Vec<f64> {
    let mut r = b.to_vec();
    m.apply_add(-1.0, x, &mut r);
    r
}

impl AmgHierarchy {
    /// Number of levels including the coarsest.
    pub fn num_levels(&self) -> usize {
        self.levels.len() + 1
    }

    pub fn levels(&self) -> &[AmgLevel] {
        &self.levels
    }

    pub fn coarse_matrix(&self) -> &CsrMatrix {
        &self.coarse_matrix
    }

    pub fn size(&self) -> usize {
        self.levels.first().map_or(self.coarse_matrix.rows(), |l| l.matrix.rows())
    }

    pub fn matrix(&self, level: usize) -> &CsrMatrix {
        if level < self.levels.len() {
            &self.levels[level].matrix
        } else {
            &self.coarse_matrix
        }
    }

    pub fn stats(&self) -> Vec<AmgLevelStats> {
        let nnz0 = self.matrix(0).nnz().max(1) as f64;
        let mut total = 0.0;
        (0..self.num_levels())
            .map(|l| {
                let m = self.matrix(l);
                total += m.nnz() as f64;
                AmgLevelStats {
                    level: l,
                    n: m.rows(),
                    nnz: m.nnz(),
                    coarse_fraction: self.levels.get(l).map_or(0.0, |lv| lv.split.coarse_fraction()),
                    operator_complexity: total / nnz0,
                }
            })
            .collect()
    }

    pub fn write_stats<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        for s in self.stats() {
            wr.serialize(s)?;
        }
        wr.flush()?;
        Ok(())
    }

    fn coarse_solve(&self, b: &[f64], x: &mut [f64]) {
        match &self.coarse {
            CoarseSolve::Dense(lu) => lu.solve_into(b, x),
            CoarseSolve::Relax(diag) => {
                for _ in 0..4 {
                    gauss_seidel(&self.coarse_matrix, diag, b, x, true);
                    gauss_seidel(&self.coarse_matrix, diag, b, x, false);
                }
            }
        }
    }

    fn cycle(&self, level: usize, b: &[f64], x: &mut [f64]) {
        if level == self.levels.len() {
            self.coarse_solve(b, x);
            return;
        }
        let lv = &self.levels[level];
        gauss_seidel(&lv.matrix, &lv.diag, b, x, true);
        let r = residual(&lv.matrix, b, x);
        let rc = lv.restrict.spmv(&r).expect("restriction size");
        let mut ec = vec![0.0; rc.len()];
        self.cycle(level + 1, &rc, &mut ec);
        lv.interp.apply_add(1.0, &ec, x);
        gauss_seidel(&lv.matrix, &lv.diag, b, x, false);
    }

    /// One V(1,1) cycle starting from `x`.
    pub fn vcycle(&self, b: &[f64], x: &mut [f64]) -> Result<()> {
        let n = self.size();
        for (op, len) in [("V-cycle rhs", b.len()), ("V-cycle iterate", x.len())] {
            if len != n {
                return Err(SaddleError::DimensionMismatch { op, expected: n, got: len });
            }
        }
        self.cycle(0, b, x);
        Ok(())
    }

    /// V-cycle with zero initial guess.
    pub fn apply(&self, b: &[f64]) -> Result<Vec<f64>> {
        let mut x = vec![0.0; b.len()];
        self.vcycle(b, &mut x)?;
        Ok(x)
    }
}

/// Standalone V-cycle entry point.
pub fn amg_vcycle(h: &AmgHierarchy, b: &[f64], x: &[f64]) -> Result<Vec<f64>> {
    let mut out = x.to_vec();
    h.vcycle(b, &mut out)?;
    Ok(out)
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::sparse::norm2;

    pub(crate) fn laplace_1d(n: usize) -> CsrMatrix {
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

    pub(crate) fn laplace_2d(n: usize, eps: f64) -> CsrMatrix {
        let mut t = Vec::new();
        let id = |i: usize, j: usize| i * n + j;
        for i in 0..n {
            for j in 0..n {
                t.push((id(i, j), id(i, j), 2.0 + 2.0 * eps));
                if i > 0 {
                    t.push((id(i, j), id(i - 1, j), -1.0));
                }
                if i + 1 < n {
                    t.push((id(i, j), id(i + 1, j), -1.0));
                }
                if j > 0 {
                    t.push((id(i, j), id(i, j - 1), -eps));
                }
                if j + 1 < n {
                    t.push((id(i, j), id(i, j + 1), -eps));
                }
            }
        }
        CsrMatrix::from_triplets(n * n, n * n, &t).unwrap()
    }

    #[test]
    fn strength_of_simple_stencils() {
        let s = strength_connections(&CsrMatrix::identity(5), THETA);
        assert!((0..5).all(|i| s.strong(i).is_empty()));
        let s = strength_connections(&laplace_1d(5), THETA);
        assert_eq!(s.strong(2), &[1, 3]);
        assert_eq!(s.strong(0), &[1]);
        let s = strength_connections(&laplace_2d(5, 0.01), THETA);
        // row (2,2) = 12: strong only along the first grid index
        assert_eq!(s.strong(12), &[7, 17]);
    }

    #[test]
    fn positive_offdiagonals_are_weak() {
        let m = CsrMatrix::from_dense(2, 2, &[2.0, 1.0, 1.0, 2.0]);
        let s = strength_connections(&m, THETA);
        assert!(s.strong(0).is_empty() && s.strong(1).is_empty());
    }

    #[test]
    fn laplace_1d_coarsening_is_alternating() {
        let s = strength_connections(&laplace_1d(9), THETA);
        let split = rs_coarsen(&s);
        let labels: String = split
            .labels
            .iter()
            .map(|l| if *l == PointType::C { 'C' } else { 'F' })
            .collect();
        assert_eq!(labels, "FCFCFCFCF");
        assert_eq!(split.n_coarse(), 4);
    }

    #[test]
    fn degenerate_splits() {
        let split = rs_coarsen(&strength_connections(&CsrMatrix::identity(4), THETA));
        assert_eq!(split.n_coarse(), 0);
        let s = strength_connections(&CsrMatrix::identity(4), THETA);
        let p = build_interpolation(&CsrMatrix::identity(4), &s, &split).unwrap();
        assert_eq!((p.rows(), p.cols(), p.nnz()), (4, 0, 0));
        let one = rs_coarsen(&strength_connections(&CsrMatrix::identity(1), THETA));
        assert_eq!(one.len(), 1);
    }

    #[test]
    fn laplace_1d_weights_are_halves() {
        let m = laplace_1d(9);
        let (split, p) = coarsen_step(&m, THETA).unwrap();
        for i in 0..9 {
            let (c, v) = p.row(i);
            if split.is_coarse(i) {
                assert_eq!((c, v), (&[split.coarse_index(i).unwrap()][..], &[1.0][..]));
            } else if i > 0 && i < 8 {
                assert_eq!(v, &[0.5, 0.5]);
            }
        }
    }

    #[test]
    fn truncation_keeps_row_sum() {
        let mut row = vec![(0, 0.9), (1, 0.04)];
        truncate_row(&mut row);
        assert_eq!(row.len(), 1);
        assert!((row[0].1 - 0.94).abs() < 1e-15);
        let mut row = vec![(0, 0.5), (1, -0.3), (2, 0.01), (3, 0.2)];
        truncate_row(&mut row);
        assert_eq!(row.len(), 3);
        assert!((row.iter().map(|e| e.1).sum::<f64>() - 0.41).abs() < 1e-15);
    }

    #[test]
    fn small_input_is_solved_directly() {
        let m = laplace_1d(800);
        let h = amg_setup(&m, THETA).unwrap();
        assert_eq!(h.num_levels(), 1);
        let b: Vec<f64> = (0..800).map(|i| (i as f64).sin()).collect();
        let x = h.apply(&b).unwrap();
        let r = residual(&m, &b, &x);
        assert!(norm2(&r) < 1e-9 * norm2(&b));
        let id = amg_setup(&CsrMatrix::identity(20), THETA).unwrap();
        assert_eq!(id.apply(&[1.0; 20]).unwrap(), vec![1.0; 20]);
    }

    #[test]
    fn poisson_hierarchy_and_contraction() {
        let m = laplace_2d(64, 1.0);
        let h = amg_setup(&m, THETA).unwrap();
        assert!(h.num_levels() >= 3, "{:?}", h.stats());
        assert!(h.coarse_matrix().rows() <= MAX_COARSE);
        let b: Vec<f64> = (0..m.rows()).map(|i| ((i * 7919) % 101) as f64 - 50.0).collect();
        let mut x = vec![0.0; b.len()];
        let mut prev = norm2(&b);
        for _ in 0..5 {
            h.vcycle(&b, &mut x).unwrap();
            let r = norm2(&residual(&m, &b, &x));
            assert!(r <= 0.2 * prev, "factor {}", r / prev);
            prev = r;
        }
        let zero = h.apply(&vec![0.0; b.len()]).unwrap();
        assert!(zero.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn stats_csv_has_one_row_per_level() {
        let h = amg_setup(&laplace_2d(40, 1.0), THETA).unwrap();
        let mut buf = Vec::new();
        h.write_stats(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("level,n,nnz,coarse_fraction,operator_complexity"));
        assert_eq!(text.lines().count(), h.num_levels() + 1);
    }

    #[test]
    fn asymmetric_input_is_rejected() {
        let m = CsrMatrix::from_dense(2, 2, &[2.0, -1.0, 0.0, 2.0]);
        assert!(matches!(amg_setup(&m, THETA), Err(SaddleError::NotSymmetric { .. })));
    }
}
