//! Right-preconditioned GMRES and the preconditioners compared in the
//! benchmarks.

use std::fmt;
use std::io::Write;
use std::str::FromStr;
use std::time::Instant;

use crate::amg::{amg_setup, AmgHierarchy, THETA};
use crate::error::{Result, SaddleError};
use crate::sparse::{axpy, dot, lumped_inverse_diag, norm2};
use crate::spamg::{schur_surrogate, spamg_setup, SaddleMatrix, SmootherKind, SpamgHierarchy};

pub const DEFAULT_MAXIT: usize = 1000;
pub const DEFAULT_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PreconditionerKind {
    None,
    Diag,
    Schur,
    Spamg(SmootherKind),
}

impl PreconditionerKind {
    pub const ALL: [PreconditionerKind; 6] = [
        PreconditionerKind::None,
        PreconditionerKind::Diag,
        PreconditionerKind::Schur,
        PreconditionerKind::Spamg(SmootherKind::Uzawa),
        PreconditionerKind::Spamg(SmootherKind::VankaOne),
        PreconditionerKind::Spamg(SmootherKind::VankaScale),
    ];

    /// Command-line identifier.
    pub fn id(self) -> &'static str {
        match self {
            PreconditionerKind::None => "none",
            PreconditionerKind::Diag => "diag",
            PreconditionerKind::Schur => "schur",
            PreconditionerKind::Spamg(SmootherKind::Uzawa) => "spamg-uzawa",
            PreconditionerKind::Spamg(SmootherKind::VankaOne) => "spamg-vanka1",
            PreconditionerKind::Spamg(SmootherKind::VankaScale) => "spamg-vankas",
        }
    }
}

impl fmt::Display for PreconditionerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for PreconditionerKind {
    type Err = SaddleError;

    fn from_str(s: &str) -> Result<Self> {
        PreconditionerKind::ALL
            .into_iter()
            .find(|k| k.id() == s)
            .ok_or_else(|| SaddleError::Parse(format!("unknown preconditioner '{s}'")))
    }
}

/// A set-up preconditioner; applying it is a fixed linear map.
#[derive(Debug, Clone)]
pub enum Preconditioner {
    None,
    /// `blockdiag(lumped(A)⁻¹, -diag(B lumped(A)⁻¹ Bᵀ)⁻¹)`
    Diag { a_inv: Vec<f64>, s_inv: Vec<f64> },
    /// `blockdiag(lumped(A)⁻¹, -AMG(B diag(A)⁻¹ Bᵀ))`
    Schur { a_inv: Vec<f64>, amg: Box<AmgHierarchy> },
    Spamg(Box<SpamgHierarchy>),
}

impl Preconditioner {
    pub fn setup(kind: PreconditionerKind, m: &SaddleMatrix) -> Result<Self> {
        Ok(match kind {
            PreconditionerKind::None => Preconditioner::None,
            PreconditionerKind::Diag => {
                let a_inv = lumped_inverse_diag(&m.a)?;
                let s = schur_surrogate(m, &a_inv)?.diagonal();
                let s_inv = s
                    .iter()
                    .enumerate()
                    .map(|(j, &v)| {
                        if v > 0.0 {
                            Ok(1.0 / v)
                        } else {
                            Err(SaddleError::NonPositive {
                                what: "Schur diagonal",
                                index: j,
                                value: v,
                            })
                        }
                    })
                    .collect::<Result<Vec<_>>>()?;
                Preconditioner::Diag { a_inv, s_inv }
            }
            PreconditionerKind::Schur => {
                let a_inv = lumped_inverse_diag(&m.a)?;
                let d_inv: Vec<f64> = m.a.diagonal().iter().map(|v| 1.0 / v).collect();
                let s = schur_surrogate(m, &d_inv)?.symmetrize();
                Preconditioner::Schur {
                    a_inv,
                    amg: Box::new(amg_setup(&s, THETA)?),
                }
            }
            PreconditionerKind::Spamg(kind) => Preconditioner::Spamg(Box::new(spamg_setup(m, kind)?)),
        })
    }

    pub fn kind(&self) -> PreconditionerKind {
        match self {
            Preconditioner::None => PreconditionerKind::None,
            Preconditioner::Diag { .. } => PreconditionerKind::Diag,
            Preconditioner::Schur { .. } => PreconditionerKind::Schur,
            Preconditioner::Spamg(h) => PreconditionerKind::Spamg(h.kind),
        }
    }

    /// `z = M⁻¹ r` on a stacked `[u; p]` vector.
    pub fn apply(&self, r: &[f64]) -> Result<Vec<f64>> {
        Ok(match self {
            Preconditioner::None => r.to_vec(),
            Preconditioner::Diag { a_inv, s_inv } => {
                check_len(r.len(), a_inv.len() + s_inv.len())?;
                let n_u = a_inv.len();
                let mut z: Vec<f64> = r[..n_u].iter().zip(a_inv).map(|(x, d)| x * d).collect();
                z.extend(r[n_u..].iter().zip(s_inv).map(|(x, d)| -x * d));
                z
            }
            Preconditioner::Schur { a_inv, amg } => {
                let n_u = a_inv.len();
                check_len(r.len(), n_u + amg.size())?;
                let mut z: Vec<f64> = r[..n_u].iter().zip(a_inv).map(|(x, d)| x * d).collect();
                z.extend(amg.apply(&r[n_u..])?.into_iter().map(|v| -v));
                z
            }
            Preconditioner::Spamg(h) => h.apply(r)?,
        })
    }
}

fn check_len(got: usize, expected: usize) -> Result<()> {
    if got != expected {
        return Err(SaddleError::DimensionMismatch {
            op: "preconditioner",
            expected,
            got,
        });
    }
    Ok(())
}

pub fn apply_preconditioner(pc: &Preconditioner, r: &[f64]) -> Result<Vec<f64>> {
    pc.apply(r)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub iterations: usize,
    pub converged: bool,
    /// Relative residual estimate per iteration, starting with iteration 0.
    pub residuals: Vec<f64>,
    /// True relative residual of the returned iterate.
    pub final_residual: f64,
    pub setup_seconds: f64,
    pub solve_seconds: f64,
}

impl SolveReport {
    pub fn write_residuals<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["iteration", "relative_residual"])?;
        for (i, r) in self.residuals.iter().enumerate() {
            wr.write_record([i.to_string(), format!("{r:.6e}")])?;
        }
        wr.flush()?;
        Ok(())
    }
}

fn true_residual(m: &SaddleMatrix, b: &[f64], x: &[f64], bnorm: f64) -> f64 {
    let mut ax = vec![0.0; b.len()];
    m.apply(x, &mut ax);
    let r: Vec<f64> = b.iter().zip(&ax).map(|(b, a)| b - a).collect();
    norm2(&r) / bnorm
}

/// `x = M⁻¹ V y`; `g` is the rotated right-hand side relative to `‖b‖`.
fn assemble_solution(
    pc: &Preconditioner,
    basis: &[Vec<f64>],
    h: &[Vec<f64>],
    g: &[f64],
    k: usize,
    bnorm: f64,
) -> Result<Vec<f64>> {
    let mut y = vec![0.0; k];
    for i in (0..k).rev() {
        let mut s = g[i] * bnorm;
        for j in i + 1..k {
            s -= h[j][i] * y[j];
        }
        y[i] = s / h[i][i];
    }
    let mut vy = vec![0.0; basis[0].len()];
    for (j, v) in basis.iter().take(k).enumerate() {
        axpy(y[j], v, &mut vy);
    }
    pc.apply(&vy)
}

/// Right-preconditioned GMRES from a zero initial guess, without restart.
/// Stops once the true relative residual `‖b - 𝒜x‖/‖b‖` is at most `tol`.
pub fn gmres(
    m: &SaddleMatrix,
    pc: &Preconditioner,
    b: &[f64],
    tol: f64,
    maxit: usize,
) -> Result<(Vec<f64>, SolveReport)> {
    let n = m.size();
    check_len(b.len(), n)?;
    let start = Instant::now();
    let bnorm = norm2(b);
    let mut report = SolveReport {
        iterations: 0,
        converged: true,
        residuals: vec![1.0],
        final_residual: 0.0,
        setup_seconds: 0.0,
        solve_seconds: 0.0,
    };
    if bnorm == 0.0 {
        report.residuals[0] = 0.0;
        return Ok((vec![0.0; n], report));
    }
    let non_finite = || SaddleError::NonFinite {
        preconditioner: pc.kind().to_string(),
    };
    let mut basis: Vec<Vec<f64>> = vec![b.iter().map(|v| v / bnorm).collect()];
    // h[j] is column j of the Hessenberg matrix, already rotated
    let mut h: Vec<Vec<f64>> = Vec::new();
    let mut cs: Vec<f64> = Vec::new();
    let mut sn: Vec<f64> = Vec::new();
    let mut g = vec![1.0];
    let mut w = vec![0.0; n];
    let mut x = vec![0.0; n];
    let mut converged = false;
    let mut k = 0;
    let mut last_true = 1.0;
    while k < maxit {
        let z = pc.apply(&basis[k])?;
        m.apply(&z, &mut w);
        if w.iter().any(|v| !v.is_finite()) {
            return Err(non_finite());
        }
        let wnorm0 = norm2(&w);
        let mut col = vec![0.0; k + 2];
        for (i, v) in basis.iter().enumerate() {
            let hij = dot(&w, v);
            col[i] = hij;
            axpy(-hij, v, &mut w);
        }
        let hnext = norm2(&w);
        col[k + 1] = hnext;
        for i in 0..k {
            let t = cs[i] * col[i] + sn[i] * col[i + 1];
            col[i + 1] = -sn[i] * col[i] + cs[i] * col[i + 1];
            col[i] = t;
        }
        let denom = col[k].hypot(col[k + 1]);
        if !denom.is_finite() {
            return Err(non_finite());
        }
        let (c, s) = if denom == 0.0 { (1.0, 0.0) } else { (col[k] / denom, col[k + 1] / denom) };
        col[k] = denom;
        col[k + 1] = 0.0;
        cs.push(c);
        sn.push(s);
        let gk = g[k];
        g[k] = c * gk;
        g.push(-s * gk);
        h.push(col);
        k += 1;
        let estimate = g[k].abs();
        report.residuals.push(estimate);
        let breakdown = hnext <= 1e-14 * wnorm0.max(f64::MIN_POSITIVE);
        if estimate <= tol || breakdown {
            x = assemble_solution(pc, &basis, &h, &g, k, bnorm)?;
            last_true = true_residual(m, b, &x, bnorm);
            if last_true <= tol {
                converged = true;
                break;
            }
            if breakdown {
                break;
            }
        }
        if k < maxit {
            basis.push(w.iter().map(|v| v / hnext).collect());
        }
    }
    if !converged {
        x = assemble_solution(pc, &basis, &h, &g, k, bnorm)?;
        last_true = true_residual(m, b, &x, bnorm);
    }
    report.iterations = k;
    report.converged = converged;
    report.final_residual = last_true;
    report.solve_seconds = start.elapsed().as_secs_f64();
    Ok((x, report))
}
