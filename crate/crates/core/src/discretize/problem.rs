//! Conductivity fields and manufactured solutions with closed-form data.

use std::f64::consts::PI;

use crate::mesh::BoundarySpec;

pub type Mat3 = [[f64; 3]; 3];

/// Smooth radial contrast bump.
///
/// `m(x) = 1 - c * h(b - r) / (h(b - r) + h(r - a))` with `r = |x - center|`
/// and `h(t) = exp(-1/t)` for `t > 0`, else 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BumpParams {
    pub center: [f64; 3],
    pub inner: f64,
    pub outer: f64,
    pub contrast: f64,
}

fn mollifier(t: f64) -> f64 {
    if t <= 1e-300 {
        0.0
    } else {
        (-1.0 / t).exp()
    }
}

fn mollifier_deriv(t: f64) -> f64 {
    if t <= 1e-300 {
        0.0
    } else {
        mollifier(t) / (t * t)
    }
}

impl BumpParams {
    pub fn radius(&self, x: &[f64; 3], dim: usize) -> f64 {
        (0..dim).map(|k| (x[k] - self.center[k]).powi(2)).sum::<f64>().sqrt()
    }

    pub fn value(&self, x: &[f64; 3], dim: usize) -> f64 {
        let r = self.radius(x, dim);
        let h1 = mollifier(self.outer - r);
        let h2 = mollifier(r - self.inner);
        1.0 - self.contrast * h1 / (h1 + h2)
    }

    pub fn gradient(&self, x: &[f64; 3], dim: usize) -> [f64; 3] {
        let r = self.radius(x, dim);
        let mut g = [0.0; 3];
        if r <= self.inner || r >= self.outer || r == 0.0 {
            return g;
        }
        let h1 = mollifier(self.outer - r);
        let h2 = mollifier(r - self.inner);
        let dh1 = -mollifier_deriv(self.outer - r);
        let dh2 = mollifier_deriv(r - self.inner);
        let s = h1 + h2;
        let dphi = (dh1 * h2 - h1 * dh2) / (s * s);
        let dm = -self.contrast * dphi;
        for k in 0..dim {
            g[k] = dm * (x[k] - self.center[k]) / r;
        }
        g
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ConductivityField {
    Identity,
    /// `kappa * I`.
    Scaled(f64),
    /// The non-diagonal tensor with `sin(2 pi x)` off-diagonal coupling.
    Example3,
    /// `m(x) * I` with the contrast bump.
    Bump(BumpParams),
}

impl ConductivityField {
    pub fn eval(&self, x: &[f64; 3], dim: usize) -> Mat3 {
        let mut k = [[0.0; 3]; 3];
        match *self {
            ConductivityField::Identity => (0..dim).for_each(|i| k[i][i] = 1.0),
            ConductivityField::Scaled(s) => (0..dim).for_each(|i| k[i][i] = s),
            ConductivityField::Example3 => {
                k[0][0] = (x[0] / 2.0 + x[1] / 4.0).exp();
                k[1][1] = (x[0] / 4.0 + x[1] / 2.0).exp();
                k[0][1] = (2.0 * PI * x[0]).sin();
                k[1][0] = k[0][1];
                if dim == 3 {
                    k[2][2] = x[2].exp();
                }
            }
            ConductivityField::Bump(b) => {
                let m = b.value(x, dim);
                (0..dim).for_each(|i| k[i][i] = m);
            }
        }
        k
    }

    /// `d[q][i][j] = dK_ij / dx_q`.
    pub fn derivative(&self, x: &[f64; 3], dim: usize) -> [Mat3; 3] {
        let mut d = [[[0.0; 3]; 3]; 3];
        match *self {
            ConductivityField::Identity | ConductivityField::Scaled(_) => {}
            ConductivityField::Example3 => {
                let e1 = (x[0] / 2.0 + x[1] / 4.0).exp();
                let e2 = (x[0] / 4.0 + x[1] / 2.0).exp();
                let c = 2.0 * PI * (2.0 * PI * x[0]).cos();
                d[0][0][0] = 0.5 * e1;
                d[0][1][1] = 0.25 * e2;
                d[0][0][1] = c;
                d[0][1][0] = c;
                d[1][0][0] = 0.25 * e1;
                d[1][1][1] = 0.5 * e2;
                if dim == 3 {
                    d[2][2][2] = x[2].exp();
                }
            }
            ConductivityField::Bump(b) => {
                let g = b.gradient(x, dim);
                for q in 0..dim {
                    for i in 0..dim {
                        d[q][i][i] = g[q];
                    }
                }
            }
        }
        d
    }
}

/// One-dimensional factor of a separable pressure term.
#[derive(Debug, Clone, PartialEq)]
pub enum Factor {
    /// Polynomial with coefficients in increasing degree.
    Poly(Vec<f64>),
    Exp,
    Sin,
}

impl Factor {
    pub fn one() -> Self {
        Factor::Poly(vec![1.0])
    }

    /// Value and first two derivatives.
    pub fn eval(&self, t: f64) -> (f64, f64, f64) {
        match self {
            Factor::Exp => {
                let e = t.exp();
                (e, e, e)
            }
            Factor::Sin => (t.sin(), t.cos(), -t.sin()),
            Factor::Poly(c) => {
                let (mut v, mut d1, mut d2) = (0.0, 0.0, 0.0);
                for (k, &ck) in c.iter().enumerate().rev() {
                    v = v * t + ck;
                    if k >= 1 {
                        d1 = d1 * t + k as f64 * ck;
                    }
                    if k >= 2 {
                        d2 = d2 * t + (k * (k - 1)) as f64 * ck;
                    }
                }
                (v, d1, d2)
            }
        }
    }
}

/// Sum of separable terms `sum_t prod_k F_tk(x_k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Pressure {
    terms: Vec<[Factor; 3]>,
}

impl Pressure {
    pub fn zero() -> Self {
        Pressure { terms: Vec::new() }
    }

    pub fn new(terms: Vec<[Factor; 3]>) -> Self {
        Pressure { terms }
    }

    /// `p = c0 + c . x`.
    pub fn affine(c0: f64, c: [f64; 3]) -> Self {
        let one = Factor::one;
        let mut terms = vec![[Factor::Poly(vec![c0]), one(), one()]];
        for k in 0..3 {
            let mut t = [one(), one(), one()];
            t[k] = Factor::Poly(vec![0.0, c[k]]);
            terms.push(t);
        }
        Pressure { terms }
    }

    /// `p = sum_k c_k x_k^2 / 2`; with `K = I` the flux is `(c_k x_k)`.
    pub fn diagonal_quadratic(c: [f64; 3]) -> Self {
        let one = Factor::one;
        let terms = (0..3)
            .map(|k| {
                let mut t = [one(), one(), one()];
                t[k] = Factor::Poly(vec![0.0, 0.0, 0.5 * c[k]]);
                t
            })
            .collect();
        Pressure { terms }
    }

    pub fn value(&self, x: &[f64; 3]) -> f64 {
        self.terms
            .iter()
            .map(|t| (0..3).map(|k| t[k].eval(x[k]).0).product::<f64>())
            .sum()
    }

    pub fn gradient(&self, x: &[f64; 3]) -> [f64; 3] {
        let mut g = [0.0; 3];
        for t in &self.terms {
            let e: Vec<(f64, f64, f64)> = (0..3).map(|k| t[k].eval(x[k])).collect();
            for (q, gq) in g.iter_mut().enumerate() {
                *gq += (0..3).map(|k| if k == q { e[k].1 } else { e[k].0 }).product::<f64>();
            }
        }
        g
    }

    pub fn hessian(&self, x: &[f64; 3]) -> Mat3 {
        let mut h = [[0.0; 3]; 3];
        for t in &self.terms {
            let e: Vec<(f64, f64, f64)> = (0..3).map(|k| t[k].eval(x[k])).collect();
            for (q, hq) in h.iter_mut().enumerate() {
                for (r, hqr) in hq.iter_mut().enumerate() {
                    *hqr += (0..3)
                        .map(|k| match (k == q, k == r) {
                            (true, true) => e[k].2,
                            (true, false) | (false, true) => e[k].1,
                            (false, false) => e[k].0,
                        })
                        .product::<f64>();
                }
            }
        }
        h
    }
}

/// Exact solution and data of a mixed Poisson problem: `u = K grad p`,
/// `f = -div u`, Dirichlet data `p`, Neumann data `u . n`.
#[derive(Debug, Clone, PartialEq)]
pub struct ManufacturedProblem {
    pub dim: usize,
    pub pressure: Pressure,
    pub conductivity: ConductivityField,
    pub boundary: BoundarySpec,
}

impl ManufacturedProblem {
    fn poly(c: &[f64]) -> Factor {
        Factor::Poly(c.to_vec())
    }

    /// `p = (x^2 - x^3)(y^2 - y^3)[(z - z^2)]`, `K = I`, homogeneous Dirichlet.
    pub fn example1(dim: usize) -> Self {
        let q = || Self::poly(&[0.0, 0.0, 1.0, -1.0]);
        let z = if dim == 3 { Self::poly(&[0.0, 1.0, -1.0]) } else { Factor::one() };
        ManufacturedProblem {
            dim,
            pressure: Pressure::new(vec![[q(), q(), z]]),
            conductivity: ConductivityField::Identity,
            boundary: BoundarySpec::all_dirichlet(),
        }
    }

    /// `p = x y (1-y) (1-x)^2 [(1-z)]`, `K = I`, Neumann on `y = 0, 1`.
    pub fn example2(dim: usize) -> Self {
        let x = Self::poly(&[0.0, 1.0, -2.0, 1.0]);
        let y = Self::poly(&[0.0, 1.0, -1.0]);
        let z = if dim == 3 { Self::poly(&[1.0, -1.0]) } else { Factor::one() };
        ManufacturedProblem {
            dim,
            pressure: Pressure::new(vec![[x, y, z]]),
            conductivity: ConductivityField::Identity,
            boundary: BoundarySpec::neumann_in_y(),
        }
    }

    /// `p = e^x sin(y) [(1 + z^2)]` with the non-diagonal tensor.
    pub fn example3(dim: usize) -> Self {
        let z = if dim == 3 { Self::poly(&[1.0, 0.0, 1.0]) } else { Factor::one() };
        ManufacturedProblem {
            dim,
            pressure: Pressure::new(vec![[Factor::Exp, Factor::Sin, z]]),
            conductivity: ConductivityField::Example3,
            boundary: BoundarySpec::all_dirichlet(),
        }
    }

    /// `p = sin(x) e^y [(1 + z^2)]` with `K = m(x) I`.
    pub fn example4(dim: usize, bump: BumpParams) -> Self {
        let z = if dim == 3 { Self::poly(&[1.0, 0.0, 1.0]) } else { Factor::one() };
        ManufacturedProblem {
            dim,
            pressure: Pressure::new(vec![[Factor::Sin, Factor::Exp, z]]),
            conductivity: ConductivityField::Bump(bump),
            boundary: BoundarySpec::all_dirichlet(),
        }
    }

    pub fn zero(dim: usize) -> Self {
        ManufacturedProblem {
            dim,
            pressure: Pressure::zero(),
            conductivity: ConductivityField::Identity,
            boundary: BoundarySpec::all_dirichlet(),
        }
    }

    pub fn pressure(&self, x: &[f64; 3]) -> f64 {
        self.pressure.value(x)
    }

    pub fn conductivity(&self, x: &[f64; 3]) -> Mat3 {
        self.conductivity.eval(x, self.dim)
    }

    pub fn flux(&self, x: &[f64; 3]) -> [f64; 3] {
        let k = self.conductivity(x);
        let g = self.pressure.gradient(x);
        let mut u = [0.0; 3];
        for a in 0..self.dim {
            u[a] = (0..self.dim).map(|b| k[a][b] * g[b]).sum();
        }
        u
    }

    /// `J[a][q] = du_a / dx_q`.
    pub fn flux_jacobian(&self, x: &[f64; 3]) -> Mat3 {
        let d = self.dim;
        let k = self.conductivity(x);
        let dk = self.conductivity.derivative(x, d);
        let g = self.pressure.gradient(x);
        let h = self.pressure.hessian(x);
        let mut j = [[0.0; 3]; 3];
        for a in 0..d {
            for q in 0..d {
                j[a][q] = (0..d).map(|c| dk[q][a][c] * g[c] + k[a][c] * h[c][q]).sum();
            }
        }
        j
    }

    /// `f = -div u`.
    pub fn source(&self, x: &[f64; 3]) -> f64 {
        let j = self.flux_jacobian(x);
        -(0..self.dim).map(|a| j[a][a]).sum::<f64>()
    }
}
