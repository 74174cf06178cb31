//! Monolithic algebraic multigrid for saddle-point systems
//! `[[A, Bᵀ], [B, -C]]`.
//!
//! Coarse grids come from classical AMG applied separately to `A` and to
//! `Z = B Â⁻¹ Bᵀ + C`. The block prolongation is stabilized by coupling
//! fine velocity points to the coarse pressures through `-Â_F⁻¹ B_Fᵀ P_p`,
//! and coarse operators are full block triple products, which produce a
//! nonzero `C` block on every coarse level.

use std::fmt;
use std::io::Write;

use serde::Serialize;

use crate::amg::{coarsen_step, CfSplit, MAX_COARSE, THETA};
use crate::error::{Result, SaddleError};
use crate::sparse::{dot, galerkin_product, norm2, CsrMatrix, DenseLu};

pub const POWER_STEPS: usize = 20;
pub const SAFETY: f64 = 1.1;
const STALL_FRACTION: f64 = 0.95;
const MAX_LEVELS: usize = 40;
/// Relative tolerance for the semidefiniteness check of coarse `C` blocks.
const PSD_TOLERANCE: f64 = 1e-10;

/// Block matrix `[[A, Bᵀ], [B, -C]]`, with `Bᵀ` cached.
#[derive(Debug, Clone, PartialEq)]
pub struct SaddleMatrix {
    pub a: CsrMatrix,
    pub b: CsrMatrix,
    pub c: CsrMatrix,
    bt: CsrMatrix,
}

impl SaddleMatrix {
    pub fn new(a: CsrMatrix, b: CsrMatrix, c: CsrMatrix) -> Result<Self> {
        let (n_u, n_p) = (a.rows(), b.rows());
        let checks = [
            ("A columns", n_u, a.cols()),
            ("B columns", n_u, b.cols()),
            ("C rows", n_p, c.rows()),
            ("C columns", n_p, c.cols()),
        ];
        for (op, expected, got) in checks {
            if expected != got {
                return Err(SaddleError::DimensionMismatch { op, expected, got });
            }
        }
        let bt = b.transpose();
        Ok(SaddleMatrix { a, b, c, bt })
    }

    pub fn n_u(&self) -> usize {
        self.a.rows()
    }

    pub fn n_p(&self) -> usize {
        self.b.rows()
    }

    pub fn size(&self) -> usize {
        self.n_u() + self.n_p()
    }

    pub fn bt(&self) -> &CsrMatrix {
        &self.bt
    }

    /// `y = 𝒜 x` for the stacked vector `x = [u; p]`.
    pub fn apply(&self, x: &[f64], y: &mut [f64]) {
        let n_u = self.n_u();
        let (u, p) = x.split_at(n_u);
        let (yu, yp) = y.split_at_mut(n_u);
        self.a.apply(u, yu);
        self.bt.apply_add(1.0, p, yu);
        self.b.apply(u, yp);
        self.c.apply_add(-1.0, p, yp);
    }

    /// `(v - A u - Bᵀ p, q - B u + C p)`.
    pub fn residual(&self, v: &[f64], q: &[f64], u: &[f64], p: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let mut ru = v.to_vec();
        self.a.apply_add(-1.0, u, &mut ru);
        self.bt.apply_add(-1.0, p, &mut ru);
        let mut rp = q.to_vec();
        self.b.apply_add(-1.0, u, &mut rp);
        self.c.apply_add(1.0, p, &mut rp);
        (ru, rp)
    }

    /// The assembled block matrix.
    pub fn to_csr(&self) -> CsrMatrix {
        let neg_c = self.c.scale(-1.0);
        CsrMatrix::from_blocks(&self.a, Some(&self.bt), Some(&self.b), Some(&neg_c), self.n_p(), self.n_p())
    }

    pub fn nnz(&self) -> usize {
        self.a.nnz() + 2 * self.b.nnz() + self.c.nnz()
    }
}

/// Power-iteration estimate of the largest eigenvalue of
/// `D^{-1/2} M D^{-1/2}` with `D = diag(d)`, started from normalized ones.
pub fn power_iteration(m: &CsrMatrix, d: &[f64], steps: usize) -> f64 {
    let n = m.rows();
    if n == 0 {
        return 0.0;
    }
    let s: Vec<f64> = d.iter().map(|v| 1.0 / v.sqrt()).collect();
    let mut x = vec![1.0 / (n as f64).sqrt(); n];
    let mut tmp = vec![0.0; n];
    let mut y = vec![0.0; n];
    let mut lambda = 0.0;
    for _ in 0..steps {
        for i in 0..n {
            tmp[i] = s[i] * x[i];
        }
        m.apply(&tmp, &mut y);
        for i in 0..n {
            y[i] *= s[i];
        }
        let nrm = norm2(&y);
        if nrm == 0.0 {
            return 0.0;
        }
        lambda = nrm;
        for i in 0..n {
            x[i] = y[i] / nrm;
        }
    }
    lambda
}

/// `σ · base` with `σ = safety · λ̂_max(base^{-1/2} M base^{-1/2})`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaledDiagonal {
    pub values: Vec<f64>,
    pub sigma: f64,
    pub lambda_max: f64,
}

impl ScaledDiagonal {
    fn from_base(m: &CsrMatrix, base: Vec<f64>, safety: f64, what: &'static str) -> Result<Self> {
        for (i, &v) in base.iter().enumerate() {
            if !(v > 0.0) {
                return Err(SaddleError::NonPositive { what, index: i, value: v });
            }
        }
        let lambda_max = power_iteration(m, &base, POWER_STEPS);
        let sigma = safety * lambda_max;
        let values = base.into_iter().map(|v| sigma * v).collect();
        Ok(ScaledDiagonal {
            values,
            sigma,
            lambda_max,
        })
    }

    pub fn inverse(&self) -> Vec<f64> {
        self.values.iter().map(|v| 1.0 / v).collect()
    }
}

/// Scaled diagonal of an SPD matrix that dominates it.
pub fn scaled_diag_spd(m: &CsrMatrix, safety: f64) -> Result<ScaledDiagonal> {
    ScaledDiagonal::from_base(m, m.diagonal(), safety, "diagonal entry")
}

/// `B diag(inv) Bᵀ + C`.
pub fn schur_surrogate(m: &SaddleMatrix, a_hat_inv: &[f64]) -> Result<CsrMatrix> {
    let bd = m.b.scale_rows_cols(None, Some(a_hat_inv));
    bd.matmul(&m.bt)?.add_scaled(1.0, &m.c, 1.0)
}

/// Independent classical interpolations for `A` and `Z`.
#[derive(Debug, Clone)]
pub struct BlockInterpolation {
    pub z: CsrMatrix,
    pub split_u: CfSplit,
    pub p_u: CsrMatrix,
    pub split_p: CfSplit,
    pub p_p: CsrMatrix,
}

pub fn build_block_interpolation(m: &SaddleMatrix, a_hat: &ScaledDiagonal) -> Result<BlockInterpolation> {
    let z = schur_surrogate(m, &a_hat.inverse())?.symmetrize();
    let (split_u, p_u) = coarsen_step(&m.a, THETA)?;
    let (split_p, p_p) = coarsen_step(&z, THETA)?;
    Ok(BlockInterpolation {
        z,
        split_u,
        p_u,
        split_p,
        p_p,
    })
}

/// `P̃ = [[P_u, Q], [0, P_p]]` with `Q = -Â_F⁻¹ B_Fᵀ P_p` on velocity F rows
/// and zero on velocity C rows.
#[derive(Debug, Clone, PartialEq)]
pub struct StabilizedProlongation {
    pub p_u: CsrMatrix,
    pub coupling: CsrMatrix,
    pub p_p: CsrMatrix,
    p_u_t: CsrMatrix,
    coupling_t: CsrMatrix,
    p_p_t: CsrMatrix,
}

pub fn stabilized_prolongation(
    p_u: &CsrMatrix,
    p_p: &CsrMatrix,
    split_u: &CfSplit,
    a_hat: &[f64],
    bt: &CsrMatrix,
) -> Result<StabilizedProlongation> {
    let scale: Vec<f64> = (0..a_hat.len())
        .map(|i| if split_u.is_coarse(i) { 0.0 } else { -1.0 / a_hat[i] })
        .collect();
    let coupling = bt.matmul(p_p)?.scale_rows_cols(Some(&scale), None);
    Ok(StabilizedProlongation {
        p_u_t: p_u.transpose(),
        coupling_t: coupling.transpose(),
        p_p_t: p_p.transpose(),
        p_u: p_u.clone(),
        coupling,
        p_p: p_p.clone(),
    })
}

impl StabilizedProlongation {
    pub fn fine_sizes(&self) -> (usize, usize) {
        (self.p_u.rows(), self.p_p.rows())
    }

    pub fn coarse_sizes(&self) -> (usize, usize) {
        (self.p_u.cols(), self.p_p.cols())
    }

    pub fn to_csr(&self) -> CsrMatrix {
        let (_, n_p) = self.fine_sizes();
        let (_, n_pc) = self.coarse_sizes();
        CsrMatrix::from_blocks(&self.p_u, Some(&self.coupling), None, Some(&self.p_p), n_p, n_pc)
    }

    /// `(u, p) += P̃ (eu, ep)`.
    pub fn prolong_add(&self, eu: &[f64], ep: &[f64], u: &mut [f64], p: &mut [f64]) {
        self.p_u.apply_add(1.0, eu, u);
        self.coupling.apply_add(1.0, ep, u);
        self.p_p.apply_add(1.0, ep, p);
    }

    /// `P̃ᵀ (ru, rp)`.
    pub fn restrict(&self, ru: &[f64], rp: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let (n_uc, n_pc) = self.coarse_sizes();
        let mut cu = vec![0.0; n_uc];
        self.p_u_t.apply(ru, &mut cu);
        let mut cp = vec![0.0; n_pc];
        self.coupling_t.apply(ru, &mut cp);
        self.p_p_t.apply_add(1.0, rp, &mut cp);
        (cu, cp)
    }
}

/// Block triple product `P̃ᵀ 𝒜 P̃`, returned in saddle form.
pub fn coarse_operator(m: &SaddleMatrix, pt: &StabilizedProlongation) -> Result<SaddleMatrix> {
    let q = &pt.coupling;
    let a_c = galerkin_product(&pt.p_u, &m.a)?;
    let a_pu = m.a.matmul(&pt.p_u)?;
    let b_c = pt.coupling_t.matmul(&a_pu)?.add_scaled(1.0, &pt.p_p_t.matmul(&m.b.matmul(&pt.p_u)?)?, 1.0)?;
    let ptcp = pt.p_p_t.matmul(&m.c.matmul(&pt.p_p)?)?;
    let qaq = pt.coupling_t.matmul(&m.a.matmul(q)?)?;
    let x = pt.coupling_t.matmul(&m.bt.matmul(&pt.p_p)?)?;
    let c_c = ptcp
        .add_scaled(1.0, &qaq, -1.0)?
        .add_scaled(1.0, &x, -1.0)?
        .add_scaled(1.0, &x.transpose(), -1.0)?;
    let asym = c_c.relative_asymmetry();
    if asym > 1e-10 {
        return Err(SaddleError::NotSymmetric {
            context: "coarse C block".into(),
            asymmetry: asym,
        });
    }
    SaddleMatrix::new(a_c, b_c, c_c.symmetrize())
}

/// Cheap necessary check for semidefiniteness: no diagonal entry below
/// `-tol * ‖C‖`.
fn check_coarse_c(c: &CsrMatrix, level: usize) -> Result<()> {
    let tol = PSD_TOLERANCE * c.max_abs();
    if let Some(&min) = c.diagonal().iter().min_by(|a, b| a.total_cmp(b)) {
        if min < -tol {
            return Err(SaddleError::IndefiniteCoarseBlock { level, min_eig: min });
        }
    }
    Ok(())
}

/// Symmetric inexact Uzawa step:
/// `u* = u + Â⁻¹(v - Au - Bᵀp)`, `p' = p + Ŝ⁻¹(Bu* - Cp - q)`,
/// `u' = u + Â⁻¹(v - Au - Bᵀp')`.
#[allow(clippy::too_many_arguments)]
pub fn uzawa_sweep(
    m: &SaddleMatrix,
    a_hat: &[f64],
    s_hat: &[f64],
    u: &mut [f64],
    p: &mut [f64],
    v: &[f64],
    q: &[f64],
) {
    let mut r = v.to_vec();
    m.a.apply_add(-1.0, u, &mut r);
    let mut base = r.clone(); // v - A u
    m.bt.apply_add(-1.0, p, &mut r);
    let u_star: Vec<f64> = (0..u.len()).map(|i| u[i] + r[i] / a_hat[i]).collect();
    let mut rp = vec![0.0; p.len()];
    m.b.apply(&u_star, &mut rp);
    m.c.apply_add(-1.0, p, &mut rp);
    for j in 0..p.len() {
        p[j] += (rp[j] - q[j]) / s_hat[j];
    }
    m.bt.apply_add(-1.0, p, &mut base);
    for i in 0..u.len() {
        u[i] += base[i] / a_hat[i];
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VankaWeighting {
    /// `v_i = 1`
    One,
    /// `v_i = 1/√(number of B rows touching i)`
    Scale,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VankaMode {
    Additive,
    MultiplicativeSymmetric,
}

/// One small saddle problem per pressure row.
#[derive(Debug, Clone)]
pub struct VankaPatch {
    pub pressure: usize,
    pub flux: Vec<usize>,
    pub weights: Vec<f64>,
    pub s_hat: f64,
    /// Row-major `(m+1)²` local matrix, kept for inspection.
    pub local: Vec<f64>,
    lu: DenseLu,
}

#[derive(Debug, Clone)]
pub struct VankaPatches {
    pub patches: Vec<VankaPatch>,
    pub beta: f64,
    pub weighting: VankaWeighting,
}

impl VankaPatches {
    /// Patch `Ŝ_j` values as a vector over pressures.
    pub fn s_hat(&self) -> Vec<f64> {
        self.patches.iter().map(|p| p.s_hat).collect()
    }
}

pub fn build_vanka_patches(m: &SaddleMatrix, a_hat: &[f64], weighting: VankaWeighting) -> Result<VankaPatches> {
    let n_p = m.n_p();
    let weight: Vec<f64> = (0..m.n_u())
        .map(|i| match weighting {
            VankaWeighting::One => 1.0,
            VankaWeighting::Scale => {
                let k = m.bt.row_nnz(i);
                if k == 0 {
                    1.0
                } else {
                    1.0 / (k as f64).sqrt()
                }
            }
        })
        .collect();
    let c_diag = m.c.diagonal();
    // base_j = C_jj + B_j Â_j⁻¹ B_jᵀ with the scaled patch B_j
    let base: Vec<f64> = (0..n_p)
        .map(|j| {
            let (cols, vals) = m.b.row(j);
            c_diag[j]
                + cols
                    .iter()
                    .zip(vals)
                    .map(|(&i, &b)| (b / weight[i]).powi(2) / a_hat[i])
                    .sum::<f64>()
        })
        .collect();
    let z = schur_surrogate(m, &a_hat.iter().map(|v| 1.0 / v).collect::<Vec<_>>())?;
    let scaled = ScaledDiagonal::from_base(&z, base.clone(), SAFETY, "Vanka patch Schur entry")?;
    let beta = 1.0 / scaled.sigma;
    let mut patches = Vec::with_capacity(n_p);
    for j in 0..n_p {
        let (cols, vals) = m.b.row(j);
        let k = cols.len();
        let n = k + 1;
        let s_hat = scaled.values[j];
        let mut local = vec![0.0; n * n];
        let mut sbb = 0.0;
        for (r, (&i, &b)) in cols.iter().zip(vals).enumerate() {
            let bj = b / weight[i];
            local[r * n + r] = a_hat[i];
            local[r * n + k] = bj;
            local[k * n + r] = bj;
            sbb += bj * bj / a_hat[i];
        }
        local[k * n + k] = sbb - s_hat;
        let lu = DenseLu::factor(n, &local, &format!("Vanka patch {j}"))?;
        patches.push(VankaPatch {
            pressure: j,
            flux: cols.to_vec(),
            weights: cols.iter().map(|&i| weight[i]).collect(),
            s_hat,
            local,
            lu,
        });
    }
    Ok(VankaPatches {
        patches,
        beta,
        weighting,
    })
}

struct PatchScratch {
    rhs: Vec<f64>,
    sol: Vec<f64>,
}

impl PatchScratch {
    fn new() -> Self {
        PatchScratch {
            rhs: Vec::with_capacity(16),
            sol: Vec::with_capacity(16),
        }
    }

    /// Local solve from global residuals; returns the weighted flux update
    /// in `sol[..k]` and the pressure update in `sol[k]`.
    fn solve(&mut self, patch: &VankaPatch, ru: &[f64], rp: &[f64]) {
        let k = patch.flux.len();
        self.rhs.clear();
        self.rhs
            .extend(patch.flux.iter().zip(&patch.weights).map(|(&i, &w)| w * ru[i]));
        self.rhs.push(rp[patch.pressure]);
        self.sol.resize(k + 1, 0.0);
        patch.lu.solve_into(&self.rhs, &mut self.sol);
        for (s, &w) in self.sol.iter_mut().zip(&patch.weights) {
            *s *= w;
        }
    }
}

fn multiplicative_patch(
    m: &SaddleMatrix,
    patch: &VankaPatch,
    scratch: &mut PatchScratch,
    u: &mut [f64],
    p: &mut [f64],
    ru: &mut [f64],
    rp: &mut [f64],
) {
    scratch.solve(patch, ru, rp);
    let k = patch.flux.len();
    let j = patch.pressure;
    for (t, &i) in patch.flux.iter().enumerate() {
        let du = scratch.sol[t];
        if du == 0.0 {
            continue;
        }
        u[i] += du;
        let (ac, av) = m.a.row(i);
        for (&l, &a) in ac.iter().zip(av) {
            ru[l] -= a * du;
        }
        let (bc, bv) = m.bt.row(i);
        for (&l, &b) in bc.iter().zip(bv) {
            rp[l] -= b * du;
        }
    }
    let dp = scratch.sol[k];
    if dp != 0.0 {
        p[j] += dp;
        let (bc, bv) = m.b.row(j);
        for (&l, &b) in bc.iter().zip(bv) {
            ru[l] -= b * dp;
        }
        let (cc, cv) = m.c.row(j);
        for (&l, &c) in cc.iter().zip(cv) {
            rp[l] += c * dp;
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Order {
    Forward,
    Reverse,
}

fn vanka_pass(
    m: &SaddleMatrix,
    patches: &VankaPatches,
    order: Order,
    u: &mut [f64],
    p: &mut [f64],
    ru: &mut [f64],
    rp: &mut [f64],
) {
    let mut scratch = PatchScratch::new();
    let n = patches.patches.len();
    for t in 0..n {
        let idx = if order == Order::Forward { t } else { n - 1 - t };
        multiplicative_patch(m, &patches.patches[idx], &mut scratch, u, p, ru, rp);
    }
}

/// One Vanka sweep. Additive: every patch sees the same residual.
/// Multiplicative-symmetric: patches in index order, then in reverse,
/// updating the residual after each patch.
#[allow(clippy::too_many_arguments)]
pub fn vanka_sweep(
    m: &SaddleMatrix,
    patches: &VankaPatches,
    mode: VankaMode,
    u: &mut [f64],
    p: &mut [f64],
    v: &[f64],
    q: &[f64],
) {
    let (mut ru, mut rp) = m.residual(v, q, u, p);
    match mode {
        VankaMode::Additive => {
            let mut scratch = PatchScratch::new();
            let mut du = vec![0.0; u.len()];
            let mut dp = vec![0.0; p.len()];
            for patch in &patches.patches {
                scratch.solve(patch, &ru, &rp);
                for (t, &i) in patch.flux.iter().enumerate() {
                    du[i] += scratch.sol[t];
                }
                dp[patch.pressure] += scratch.sol[patch.flux.len()];
            }
            u.iter_mut().zip(&du).for_each(|(x, d)| *x += d);
            p.iter_mut().zip(&dp).for_each(|(x, d)| *x += d);
        }
        VankaMode::MultiplicativeSymmetric => {
            vanka_pass(m, patches, Order::Forward, u, p, &mut ru, &mut rp);
            vanka_pass(m, patches, Order::Reverse, u, p, &mut ru, &mut rp);
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SmootherKind {
    Uzawa,
    VankaOne,
    VankaScale,
}

impl SmootherKind {
    pub fn name(self) -> &'static str {
        match self {
            SmootherKind::Uzawa => "uzawa",
            SmootherKind::VankaOne => "vanka-one",
            SmootherKind::VankaScale => "vanka-scale",
        }
    }
}

impl fmt::Display for SmootherKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone)]
pub enum LevelSmoother {
    Uzawa { s_hat: ScaledDiagonal },
    Vanka(VankaPatches),
}

#[derive(Debug, Clone)]
pub struct SpamgLevel {
    pub matrix: SaddleMatrix,
    pub a_hat: ScaledDiagonal,
    pub prolongation: StabilizedProlongation,
    pub smoother: LevelSmoother,
    pub split_u: CfSplit,
    pub split_p: CfSplit,
}

impl SpamgLevel {
    fn smooth(&self, u: &mut [f64], p: &mut [f64], v: &[f64], q: &[f64], order: Order) {
        match &self.smoother {
            LevelSmoother::Uzawa { s_hat } => uzawa_sweep(&self.matrix, &self.a_hat.values, &s_hat.values, u, p, v, q),
            LevelSmoother::Vanka(patches) => {
                let (mut ru, mut rp) = self.matrix.residual(v, q, u, p);
                let (first, second) = match order {
                    Order::Forward => (Order::Forward, Order::Reverse),
                    Order::Reverse => (Order::Reverse, Order::Forward),
                };
                vanka_pass(&self.matrix, patches, first, u, p, &mut ru, &mut rp);
                vanka_pass(&self.matrix, patches, second, u, p, &mut ru, &mut rp);
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct SpamgHierarchy {
    pub kind: SmootherKind,
    levels: Vec<SpamgLevel>,
    coarse: SaddleMatrix,
    coarse_lu: DenseLu,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct SpamgLevelStats {
    pub level: usize,
    pub n_u: usize,
    pub n_p: usize,
    pub nnz_a: usize,
    pub nnz_b: usize,
    pub nnz_c: usize,
    pub operator_complexity: f64,
    pub smoother: String,
}

fn build_smoother(m: &SaddleMatrix, a_hat: &ScaledDiagonal, z: &CsrMatrix, kind: SmootherKind) -> Result<LevelSmoother> {
    Ok(match kind {
        SmootherKind::Uzawa => LevelSmoother::Uzawa {
            s_hat: ScaledDiagonal::from_base(z, z.diagonal(), SAFETY, "Schur surrogate diagonal")?,
        },
        SmootherKind::VankaOne => LevelSmoother::Vanka(build_vanka_patches(m, &a_hat.values, VankaWeighting::One)?),
        SmootherKind::VankaScale => LevelSmoother::Vanka(build_vanka_patches(m, &a_hat.values, VankaWeighting::Scale)?),
    })
}

/// Builds the hierarchy down to at most `MAX_COARSE` total unknowns.
pub fn spamg_setup(top: &SaddleMatrix, kind: SmootherKind) -> Result<SpamgHierarchy> {
    for (ctx, m) in [("A block", &top.a), ("C block", &top.c)] {
        let asym = m.relative_asymmetry();
        if asym > 1e-10 {
            return Err(SaddleError::NotSymmetric {
                context: ctx.into(),
                asymmetry: asym,
            });
        }
    }
    let mut levels = Vec::new();
    let mut current = top.clone();
    let mut high_fraction = 0;
    while current.size() > MAX_COARSE && levels.len() < MAX_LEVELS {
        let a_hat = if current.n_u() > 0 {
            scaled_diag_spd(&current.a, SAFETY)?
        } else {
            ScaledDiagonal {
                values: Vec::new(),
                sigma: 1.0,
                lambda_max: 0.0,
            }
        };
        let bi = build_block_interpolation(&current, &a_hat)?;
        let coarse_total = bi.split_u.n_coarse() + bi.split_p.n_coarse();
        let frac = coarse_total as f64 / current.size() as f64;
        if coarse_total == 0 {
            break;
        }
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
        let pt = stabilized_prolongation(&bi.p_u, &bi.p_p, &bi.split_u, &a_hat.values, current.bt())?;
        let coarse = coarse_operator(&current, &pt)?;
        check_coarse_c(&coarse.c, levels.len() + 1)?;
        let smoother = build_smoother(&current, &a_hat, &bi.z, kind)?;
        levels.push(SpamgLevel {
            matrix: current,
            a_hat,
            prolongation: pt,
            smoother,
            split_u: bi.split_u,
            split_p: bi.split_p,
        });
        current = coarse;
    }
    if current.size() > 4 * MAX_COARSE {
        return Err(SaddleError::CoarseningStall {
            level: levels.len(),
            fraction: 1.0,
        });
    }
    let coarse_lu = DenseLu::factor_sparse(&current.to_csr(), &format!("SPAMG coarse level {}", levels.len()))?;
    Ok(SpamgHierarchy {
        kind,
        levels,
        coarse: current,
        coarse_lu,
    })
}

impl SpamgHierarchy {
    pub fn num_levels(&self) -> usize {
        self.levels.len() + 1
    }

    pub fn levels(&self) -> &[SpamgLevel] {
        &self.levels
    }

    pub fn matrix(&self, level: usize) -> &SaddleMatrix {
        if level < self.levels.len() {
            &self.levels[level].matrix
        } else {
            &self.coarse
        }
    }

    pub fn size(&self) -> usize {
        self.matrix(0).size()
    }

    pub fn stats(&self) -> Vec<SpamgLevelStats> {
        let nnz0 = self.matrix(0).nnz().max(1) as f64;
        let mut total = 0.0;
        (0..self.num_levels())
            .map(|l| {
                let m = self.matrix(l);
                total += m.nnz() as f64;
                SpamgLevelStats {
                    level: l,
                    n_u: m.n_u(),
                    n_p: m.n_p(),
                    nnz_a: m.a.nnz(),
                    nnz_b: m.b.nnz(),
                    nnz_c: m.c.nnz(),
                    operator_complexity: total / nnz0,
                    smoother: if l < self.levels.len() {
                        self.kind.name().to_string()
                    } else {
                        "direct".to_string()
                    },
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

    fn cycle(&self, level: usize, v: &[f64], q: &[f64], u: &mut [f64], p: &mut [f64]) {
        if level == self.levels.len() {
            let mut rhs = v.to_vec();
            rhs.extend_from_slice(q);
            let mut x = vec![0.0; rhs.len()];
            // the coarse solve is a correction on top of the incoming iterate
            let (ru, rp) = self.coarse.residual(v, q, u, p);
            rhs[..ru.len()].copy_from_slice(&ru);
            rhs[ru.len()..].copy_from_slice(&rp);
            self.coarse_lu.solve_into(&rhs, &mut x);
            let (xu, xp) = x.split_at(u.len());
            u.iter_mut().zip(xu).for_each(|(a, b)| *a += b);
            p.iter_mut().zip(xp).for_each(|(a, b)| *a += b);
            return;
        }
        let lv = &self.levels[level];
        lv.smooth(u, p, v, q, Order::Forward);
        let (ru, rp) = lv.matrix.residual(v, q, u, p);
        let (cv, cq) = lv.prolongation.restrict(&ru, &rp);
        let mut eu = vec![0.0; cv.len()];
        let mut ep = vec![0.0; cq.len()];
        self.cycle(level + 1, &cv, &cq, &mut eu, &mut ep);
        lv.prolongation.prolong_add(&eu, &ep, u, p);
        lv.smooth(u, p, v, q, Order::Reverse);
    }

    /// One V(1,1) cycle on `𝒜 [u; p] = [v; q]` starting from `(u, p)`.
    pub fn vcycle(&self, v: &[f64], q: &[f64], u: &mut [f64], p: &mut [f64]) -> Result<()> {
        let m = self.matrix(0);
        for (op, expected, got) in [
            ("V-cycle flux rhs", m.n_u(), v.len()),
            ("V-cycle pressure rhs", m.n_p(), q.len()),
            ("V-cycle flux iterate", m.n_u(), u.len()),
            ("V-cycle pressure iterate", m.n_p(), p.len()),
        ] {
            if expected != got {
                return Err(SaddleError::DimensionMismatch { op, expected, got });
            }
        }
        self.cycle(0, v, q, u, p);
        Ok(())
    }

    /// V-cycle with zero initial guess on a stacked residual.
    pub fn apply(&self, r: &[f64]) -> Result<Vec<f64>> {
        let n_u = self.matrix(0).n_u();
        if r.len() != self.size() {
            return Err(SaddleError::DimensionMismatch {
                op: "SPAMG apply",
                expected: self.size(),
                got: r.len(),
            });
        }
        let mut u = vec![0.0; n_u];
        let mut p = vec![0.0; r.len() - n_u];
        self.vcycle(&r[..n_u], &r[n_u..], &mut u, &mut p)?;
        u.extend_from_slice(&p);
        Ok(u)
    }
}

/// Standalone entry point: one V-cycle from the given iterate.
pub fn spamg_vcycle(h: &SpamgHierarchy, rhs: &[f64], iterate: &[f64]) -> Result<Vec<f64>> {
    let n_u = h.matrix(0).n_u();
    if rhs.len() != h.size() || iterate.len() != h.size() {
        return Err(SaddleError::DimensionMismatch {
            op: "SPAMG V-cycle",
            expected: h.size(),
            got: rhs.len().max(iterate.len()),
        });
    }
    let mut u = iterate[..n_u].to_vec();
    let mut p = iterate[n_u..].to_vec();
    h.vcycle(&rhs[..n_u], &rhs[n_u..], &mut u, &mut p)?;
    u.extend_from_slice(&p);
    Ok(u)
}

/// Relative residual `‖b - 𝒜x‖ / ‖b‖` of a stacked vector.
pub fn relative_residual(m: &SaddleMatrix, b: &[f64], x: &[f64]) -> f64 {
    let mut ax = vec![0.0; b.len()];
    m.apply(x, &mut ax);
    let r: Vec<f64> = b.iter().zip(&ax).map(|(b, a)| b - a).collect();
    let nb = norm2(b);
    if nb == 0.0 {
        norm2(&r)
    } else {
        (dot(&r, &r)).sqrt() / nb
    }
}

#[cfg(test)]
mod tests {
    use nalgebra::DMatrix;

    use super::*;
    use crate::discretize::{assemble_system, ManufacturedProblem};
    use crate::mesh::{balance_2to1, build_uniform, enumerate_dofs, refine_where, AdaptiveMesh, MAX_LEVEL};

    fn dense(m: &CsrMatrix) -> DMatrix<f64> {
        DMatrix::from_row_slice(m.rows(), m.cols(), &m.to_dense())
    }

    fn min_eig(m: &DMatrix<f64>) -> f64 {
        m.clone().symmetric_eigenvalues().iter().cloned().fold(f64::INFINITY, f64::min)
    }

    fn system_on(mesh: &AdaptiveMesh) -> SaddleMatrix {
        let problem = ManufacturedProblem::example1(mesh.dim());
        let dofs = enumerate_dofs(mesh, problem.boundary).unwrap();
        let sys = assemble_system(mesh, &dofs, &problem).unwrap();
        SaddleMatrix::new(sys.a, sys.b, sys.c).unwrap()
    }

    fn uniform_system(dim: usize, level: u32) -> SaddleMatrix {
        system_on(&build_uniform(dim, level).unwrap())
    }

    fn hanging_mesh() -> AdaptiveMesh {
        let m = build_uniform(2, 2).unwrap();
        let half = 1u32 << (MAX_LEVEL - 1);
        balance_2to1(&refine_where(&m, |e| e.anchor[0] < half && e.anchor[1] < half))
    }

    fn spectral_radius(n: usize, step: impl Fn(&mut [f64])) -> f64 {
        let mut e: DMatrix<f64> = DMatrix::zeros(n, n);
        for k in 0..n {
            let mut x = vec![0.0; n];
            x[k] = 1.0;
            step(&mut x);
            for i in 0..n {
                e[(i, k)] = x[i];
            }
        }
        if let Some(schur) = nalgebra::linalg::Schur::try_new(e.clone(), 1e-14, 20_000) {
            return schur.complex_eigenvalues().iter().map(|z| z.norm()).fold(0.0, f64::max);
        }
        // upper bound ‖E^k‖_F^(1/k) >= ρ(E) via repeated squaring
        let mut log_scale = 0.0;
        let mut k = 1.0;
        for _ in 0..10 {
            e = &e * &e;
            k *= 2.0;
            let nrm = e.norm();
            e /= nrm;
            log_scale = 2.0 * log_scale + nrm.ln();
        }
        (log_scale / k).exp()
    }

    #[test]
    fn scaled_diagonal_small_cases() {
        let m = CsrMatrix::from_dense(2, 2, &[2.0, 1.0, 1.0, 2.0]);
        let s = scaled_diag_spd(&m, SAFETY).unwrap();
        assert!((s.lambda_max - 1.5).abs() < 1e-14);
        assert!((s.sigma - 1.65).abs() < 1e-14);
        let d = CsrMatrix::from_diagonal(&[3.0, 5.0]);
        let s = scaled_diag_spd(&d, SAFETY).unwrap();
        assert!((s.lambda_max - 1.0).abs() < 1e-15);
        assert!((s.values[1] - 5.5).abs() < 1e-14);
        let bad = CsrMatrix::from_diagonal(&[1.0, 0.0]);
        assert!(matches!(scaled_diag_spd(&bad, SAFETY), Err(SaddleError::NonPositive { .. })));
    }

    #[test]
    fn scaled_mass_dominates_mass() {
        for m in [uniform_system(2, 3), system_on(&hanging_mesh()), uniform_system(3, 2)] {
            let s = scaled_diag_spd(&m.a, SAFETY).unwrap();
            let diff = dense(&CsrMatrix::from_diagonal(&s.values)) - dense(&m.a);
            assert!(min_eig(&diff) >= -1e-10 * m.a.max_abs(), "{}", min_eig(&diff));
        }
    }

    #[test]
    fn schur_surrogate_structure() {
        let m = uniform_system(2, 3);
        let a_hat = scaled_diag_spd(&m.a, SAFETY).unwrap();
        let z = schur_surrogate(&m, &a_hat.inverse()).unwrap();
        let mesh = build_uniform(2, 3).unwrap();
        let cell = |j: usize| {
            let c = mesh.leaves()[j].centroid(2);
            ((c[0] * 8.0) as i64, (c[1] * 8.0) as i64)
        };
        let mut interior = 0;
        for j in 0..64 {
            let (cols, _) = z.row(j);
            let (r, c) = cell(j);
            for &k in cols {
                let (r2, c2) = cell(k);
                assert!((r - r2).abs() + (c - c2).abs() <= 1, "{j} {k}");
            }
            if r > 0 && r < 7 && c > 0 && c < 7 {
                assert_eq!(z.row_nnz(j), 5);
                interior += 1;
            }
        }
        assert_eq!(interior, 36);

        let mesh = hanging_mesh();
        let m = system_on(&mesh);
        let a_hat = scaled_diag_spd(&m.a, SAFETY).unwrap();
        let z = schur_surrogate(&m, &a_hat.inverse()).unwrap();
        let side = 1.0 / 4.0;
        let coarse_next_to_fine = mesh
            .leaves()
            .iter()
            .position(|e| {
                let c = e.centroid(2);
                e.side() == side && (c[0] - 0.625).abs() < 1e-12 && (c[1] - 0.375).abs() < 1e-12
            })
            .unwrap();
        assert!(z.row_nnz(coarse_next_to_fine) - 1 > 4);
    }

    #[test]
    fn stabilization_vanishes_without_b() {
        let a = CsrMatrix::from_dense(2, 2, &[2.0, -1.0, -1.0, 2.0]);
        let b = CsrMatrix::zeros(1, 2);
        let m = SaddleMatrix::new(a, b, CsrMatrix::identity(1)).unwrap();
        let a_hat = scaled_diag_spd(&m.a, SAFETY).unwrap();
        let bi = build_block_interpolation(&m, &a_hat).unwrap();
        assert_eq!(bi.z, CsrMatrix::identity(1));
        assert_eq!(bi.split_p.n_coarse(), 0);
        let pt = stabilized_prolongation(&bi.p_u, &bi.p_p, &bi.split_u, &a_hat.values, m.bt()).unwrap();
        assert_eq!(pt.coupling.nnz(), 0);
    }

    #[test]
    fn stabilized_prolongation_matches_block_product() {
        // two elements side by side, 7 faces, 2 pressures
        let m = uniform_system(2, 1);
        let m = SaddleMatrix::new(m.a.block(0..6, 0..6), m.b.block(0..2, 0..6), CsrMatrix::zeros(2, 2)).unwrap();
        let a_hat = scaled_diag_spd(&m.a, SAFETY).unwrap();
        let labels = [true, false, true, false, false, true];
        let split = CfSplit::from_coarse_flags(&labels);
        let mut pu = Vec::new();
        let mut c = 0;
        for (i, &is_c) in labels.iter().enumerate() {
            if is_c {
                pu.push((i, c, 1.0));
                c += 1;
            } else {
                pu.push((i, 0, 0.25));
                pu.push((i, 2, 0.5));
            }
        }
        let p_u = CsrMatrix::from_triplets(6, 3, &pu).unwrap();
        let p_p = CsrMatrix::from_dense(2, 1, &[1.0, 0.5]);
        let pt = stabilized_prolongation(&p_u, &p_p, &split, &a_hat.values, m.bt()).unwrap();

        // [[I_F, 0, -Â_F⁻¹ B_Fᵀ], [0, I_C, 0], [0, 0, I]] in natural ordering
        let n = 8;
        let mut left = DMatrix::identity(n, n);
        let bt = dense(m.bt());
        for i in 0..6 {
            if !labels[i] {
                for j in 0..2 {
                    left[(i, 6 + j)] = -bt[(i, j)] / a_hat.values[i];
                }
            }
        }
        let mut right = DMatrix::zeros(n, 4);
        right.view_mut((0, 0), (6, 3)).copy_from(&dense(&p_u));
        right.view_mut((6, 3), (2, 1)).copy_from(&dense(&p_p));
        let oracle = left * right;
        let got = dense(&pt.to_csr());
        assert!((got - &oracle).abs().max() < 1e-15);

        // coarse operator against the dense triple product
        let coarse = coarse_operator(&m, &pt).unwrap();
        let full = dense(&m.to_csr());
        let expect = oracle.transpose() * full * &oracle;
        let diff = (dense(&coarse.to_csr()) - &expect).abs().max();
        assert!(diff <= 1e-12 * expect.abs().max(), "{diff}");
    }

    fn check_level(m: &SaddleMatrix, pt: &StabilizedProlongation, split_u: &CfSplit, a_hat: &[f64]) {
        let coarse = coarse_operator(m, pt).unwrap();
        let p = dense(&pt.to_csr());
        let expect = p.transpose() * dense(&m.to_csr()) * &p;
        let got = dense(&coarse.to_csr());
        assert!((&got - &expect).abs().max() <= 1e-12 * expect.abs().max());

        // closed form of the coarse C block
        let n_u = m.n_u();
        let mut bf_ahat = dense(&m.b);
        for i in 0..n_u {
            let w = if split_u.is_coarse(i) { 0.0 } else { 1.0 / a_hat[i] };
            for j in 0..m.n_p() {
                bf_ahat[(j, i)] *= w;
            }
        }
        let b = dense(&m.b);
        let pp = dense(&pt.p_p);
        let inner = dense(&m.c) + 2.0 * &bf_ahat * b.transpose() - &bf_ahat * dense(&m.a) * bf_ahat.transpose();
        let closed = pp.transpose() * inner * &pp;
        let cc = dense(&coarse.c);
        assert!((&cc - &closed).abs().max() <= 1e-12 * closed.abs().max().max(1e-300));
        assert!((&cc - cc.transpose()).abs().max() == 0.0);
        if cc.nrows() > 0 {
            assert!(min_eig(&cc) >= -1e-10 * cc.abs().max(), "{}", min_eig(&cc));
        }
    }

    #[test]
    fn modified_galerkin_matches_dense_oracle() {
        for m in [uniform_system(2, 3), system_on(&hanging_mesh()), uniform_system(2, 4)] {
            let mut current = m;
            for _ in 0..3 {
                let a_hat = scaled_diag_spd(&current.a, SAFETY).unwrap();
                let bi = build_block_interpolation(&current, &a_hat).unwrap();
                let pt = stabilized_prolongation(&bi.p_u, &bi.p_p, &bi.split_u, &a_hat.values, current.bt()).unwrap();
                check_level(&current, &pt, &bi.split_u, &a_hat.values);
                current = coarse_operator(&current, &pt).unwrap();
                if current.n_u() == 0 || current.n_p() < 4 {
                    break;
                }
            }
        }
    }

    #[test]
    fn uzawa_matches_dense_reimplementation() {
        let m = uniform_system(2, 1);
        let a_hat = scaled_diag_spd(&m.a, SAFETY).unwrap();
        let z = schur_surrogate(&m, &a_hat.inverse()).unwrap();
        let s_hat = scaled_diag_spd(&z, SAFETY).unwrap();
        let v: Vec<f64> = (0..m.n_u()).map(|i| (i as f64 * 0.7).sin()).collect();
        let q: Vec<f64> = (0..m.n_p()).map(|i| (i as f64 * 1.3).cos()).collect();
        let mut u = vec![0.0; m.n_u()];
        let mut p = vec![0.0; m.n_p()];
        uzawa_sweep(&m, &a_hat.values, &s_hat.values, &mut u, &mut p, &v, &q);

        let a = dense(&m.a);
        let b = dense(&m.b);
        let ai = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(m.n_u(), a_hat.inverse()));
        let si = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(m.n_p(), s_hat.inverse()));
        let vv = nalgebra::DVector::from_column_slice(&v);
        let qq = nalgebra::DVector::from_column_slice(&q);
        let u0 = nalgebra::DVector::zeros(m.n_u());
        let p0 = nalgebra::DVector::zeros(m.n_p());
        let ustar = &u0 + &ai * (&vv - &a * &u0 - b.transpose() * &p0);
        let p1 = &p0 + &si * (&b * &ustar - &qq);
        let u1 = &u0 + &ai * (&vv - &a * &u0 - b.transpose() * &p1);
        for i in 0..m.n_u() {
            assert!((u[i] - u1[i]).abs() < 1e-14);
        }
        for j in 0..m.n_p() {
            assert!((p[j] - p1[j]).abs() < 1e-14);
        }
    }

    fn solved(m: &SaddleMatrix) -> (Vec<f64>, Vec<f64>, Vec<f64>, Vec<f64>) {
        let u: Vec<f64> = (0..m.n_u()).map(|i| (i as f64).sin()).collect();
        let p: Vec<f64> = (0..m.n_p()).map(|i| (i as f64 * 0.3).cos()).collect();
        let mut x = u.clone();
        x.extend_from_slice(&p);
        let mut y = vec![0.0; x.len()];
        m.apply(&x, &mut y);
        let (v, q) = y.split_at(m.n_u());
        (u, p, v.to_vec(), q.to_vec())
    }

    #[test]
    fn smoothers_fix_the_exact_solution() {
        let m = uniform_system(2, 2);
        let a_hat = scaled_diag_spd(&m.a, SAFETY).unwrap();
        let (u0, p0, v, q) = solved(&m);
        let z = schur_surrogate(&m, &a_hat.inverse()).unwrap();
        let s_hat = scaled_diag_spd(&z, SAFETY).unwrap();
        let (mut u, mut p) = (u0.clone(), p0.clone());
        uzawa_sweep(&m, &a_hat.values, &s_hat.values, &mut u, &mut p, &v, &q);
        let close = |a: &[f64], b: &[f64]| a.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-12);
        assert!(close(&u, &u0) && close(&p, &p0));
        for w in [VankaWeighting::One, VankaWeighting::Scale] {
            let patches = build_vanka_patches(&m, &a_hat.values, w).unwrap();
            for mode in [VankaMode::Additive, VankaMode::MultiplicativeSymmetric] {
                let (mut u, mut p) = (u0.clone(), p0.clone());
                vanka_sweep(&m, &patches, mode, &mut u, &mut p, &v, &q);
                assert!(close(&u, &u0) && close(&p, &p0));
            }
        }
    }

    #[test]
    fn vanka_patch_shapes_and_weights() {
        let m = uniform_system(2, 3);
        let a_hat = scaled_diag_spd(&m.a, SAFETY).unwrap();
        let patches = build_vanka_patches(&m, &a_hat.values, VankaWeighting::Scale).unwrap();
        assert_eq!(patches.patches.len(), 64);
        assert!(patches.patches.iter().all(|p| p.flux.len() == 4));
        let interior = &patches.patches[9];
        assert!(interior.weights.iter().all(|&w| (w - 0.5f64.sqrt()).abs() < 1e-15));
        // a boundary face belongs to one element only
        assert!(patches.patches[0].weights.contains(&1.0));

        let one = SaddleMatrix::new(
            CsrMatrix::identity(2),
            CsrMatrix::from_dense(1, 2, &[1.0, 0.0]),
            CsrMatrix::zeros(1, 1),
        )
        .unwrap();
        let patches = build_vanka_patches(&one, &[1.5, 1.5], VankaWeighting::One).unwrap();
        assert_eq!(patches.patches[0].flux.len() + 1, 2);
    }

    #[test]
    fn additive_scaled_vanka_equals_uzawa() {
        for m in [uniform_system(2, 3), uniform_system(3, 2), system_on(&hanging_mesh())] {
            let a_hat = scaled_diag_spd(&m.a, SAFETY).unwrap();
            let patches = build_vanka_patches(&m, &a_hat.values, VankaWeighting::Scale).unwrap();
            let (_, _, v, q) = solved(&m);
            let u0: Vec<f64> = (0..m.n_u()).map(|i| (i as f64 * 0.11).cos()).collect();
            let p0: Vec<f64> = (0..m.n_p()).map(|i| (i as f64 * 0.17).sin()).collect();
            let (mut u1, mut p1) = (u0.clone(), p0.clone());
            uzawa_sweep(&m, &a_hat.values, &patches.s_hat(), &mut u1, &mut p1, &v, &q);
            let (mut u2, mut p2) = (u0.clone(), p0.clone());
            vanka_sweep(&m, &patches, VankaMode::Additive, &mut u2, &mut p2, &v, &q);
            let mut x1 = u1;
            x1.extend(p1);
            let mut x2 = u2;
            x2.extend(p2);
            let diff: Vec<f64> = x1.iter().zip(&x2).map(|(a, b)| a - b).collect();
            assert!(norm2(&diff) <= 1e-12 * norm2(&x1), "{}", norm2(&diff) / norm2(&x1));
        }
    }

    #[test]
    fn smoother_error_propagation_contracts() {
        let m = uniform_system(2, 3);
        let n_u = m.n_u();
        let n = m.size();
        let a_hat = scaled_diag_spd(&m.a, SAFETY).unwrap();
        let z = schur_surrogate(&m, &a_hat.inverse()).unwrap();
        let s_hat = scaled_diag_spd(&z, SAFETY).unwrap();
        let zero_u = vec![0.0; n_u];
        let zero_p = vec![0.0; m.n_p()];
        let rho = spectral_radius(n, |x| {
            let (u, p) = x.split_at_mut(n_u);
            uzawa_sweep(&m, &a_hat.values, &s_hat.values, u, p, &zero_u, &zero_p);
        });
        assert!(rho < 1.0, "uzawa {rho}");
        for w in [VankaWeighting::One, VankaWeighting::Scale] {
            let patches = build_vanka_patches(&m, &a_hat.values, w).unwrap();
            let rho = spectral_radius(n, |x| {
                let (u, p) = x.split_at_mut(n_u);
                vanka_sweep(&m, &patches, VankaMode::MultiplicativeSymmetric, u, p, &zero_u, &zero_p);
            });
            assert!(rho < 1.0, "{w:?} {rho}");
        }
    }

    #[test]
    fn hierarchy_shape_and_coarse_blocks() {
        let m = uniform_system(2, 5);
        assert_eq!(m.c.nnz(), 0);
        for kind in [SmootherKind::Uzawa, SmootherKind::VankaOne, SmootherKind::VankaScale] {
            let h = spamg_setup(&m, kind).unwrap();
            assert!(h.num_levels() >= 2);
            assert!(h.matrix(h.num_levels() - 1).size() <= MAX_COARSE);
            for l in 1..h.num_levels() {
                let lm = h.matrix(l);
                assert!(lm.c.nnz() > 0);
                let full = lm.to_csr();
                assert!(full.relative_asymmetry() <= 1e-10);
                if lm.size() <= 2000 {
                    let c = dense(&lm.c);
                    assert!(min_eig(&c) >= -1e-10 * c.abs().max());
                    let d = dense(&full);
                    let rank = d.clone().svd(false, false).rank(1e-12 * d.abs().max());
                    assert_eq!(rank, lm.size());
                }
            }
            let mut buf = Vec::new();
            h.write_stats(&mut buf).unwrap();
            assert_eq!(String::from_utf8(buf).unwrap().lines().count(), h.num_levels() + 1);
        }
    }

    #[test]
    fn single_level_hierarchy_is_exact() {
        let m = uniform_system(2, 3);
        let h = spamg_setup(&m, SmootherKind::Uzawa).unwrap();
        assert_eq!(h.num_levels(), 1);
        let (u, p, v, q) = solved(&m);
        let mut r = v.clone();
        r.extend_from_slice(&q);
        let x = h.apply(&r).unwrap();
        let mut exact = u;
        exact.extend(p);
        let err: Vec<f64> = x.iter().zip(&exact).map(|(a, b)| a - b).collect();
        assert!(norm2(&err) < 1e-10 * norm2(&exact));
    }

    #[test]
    fn vcycle_is_linear_and_contracts() {
        let m = uniform_system(2, 5);
        let (_, _, v, q) = solved(&m);
        let mut b = v.clone();
        b.extend_from_slice(&q);
        for kind in [SmootherKind::Uzawa, SmootherKind::VankaOne, SmootherKind::VankaScale] {
            let h = spamg_setup(&m, kind).unwrap();
            let x1 = h.apply(&b).unwrap();
            let b3: Vec<f64> = b.iter().map(|x| 3.0 * x).collect();
            let x3 = h.apply(&b3).unwrap();
            let diff: Vec<f64> = x3.iter().zip(&x1).map(|(a, c)| a - 3.0 * c).collect();
            assert!(norm2(&diff) <= 1e-13 * norm2(&x3));
            assert!(h.apply(&vec![0.0; b.len()]).unwrap().iter().all(|&v| v == 0.0));

            // residuals oscillate with Uzawa; look at the mean rate
            let mut x = spamg_vcycle(&h, &b, &vec![0.0; b.len()]).unwrap();
            let first = relative_residual(&m, &b, &x);
            for _ in 0..5 {
                x = spamg_vcycle(&h, &b, &x).unwrap();
            }
            let rate = (relative_residual(&m, &b, &x) / first).powf(0.2);
            assert!(rate < 0.5, "{kind} rate {rate}");
        }
    }
}
