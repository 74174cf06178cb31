//! RT0 mixed discretization: element matrices, global saddle-point
//! assembly, interpolation of exact fields and error norms.
//!
//! Local flux dofs of an element are ordered `2 * axis + side` (`x-, x+,
//! y-, y+, z-, z+`). Each is the normal component along the global `+axis`
//! direction at the face center, so the local basis function of face
//! `(axis, side)` is `e_axis * (1 - xi)` or `e_axis * xi` in the element's
//! reference coordinate `xi` along `axis`.

mod problem;

use std::io::Write;

pub use problem::{BumpParams, ConductivityField, Factor, ManufacturedProblem, Mat3, Pressure};

use crate::error::{Result, SaddleError};
use crate::mesh::{AdaptiveMesh, DofMap, Element, FaceStatus, FluxSlot};
use crate::sparse::{io, CsrMatrix};

/// Gauss-Legendre nodes and weights on `[0, 1]`.
fn gauss_rule(points: usize) -> (Vec<f64>, Vec<f64>) {
    match points {
        1 => (vec![0.5], vec![1.0]),
        2 => {
            let d = 0.5 / 3f64.sqrt();
            (vec![0.5 - d, 0.5 + d], vec![0.5, 0.5])
        }
        3 => {
            let d = 0.5 * (0.6f64).sqrt();
            (vec![0.5 - d, 0.5, 0.5 + d], vec![5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0])
        }
        _ => unreachable!("unsupported rule"),
    }
}

/// Tensor-product points on `[0,1]^dim`: `(xi, weight)`.
fn tensor_rule(dim: usize, points: usize) -> Vec<([f64; 3], f64)> {
    let (x, w) = gauss_rule(points);
    let n = x.len();
    let total = n.pow(dim as u32);
    (0..total)
        .map(|mut k| {
            let mut xi = [0.0; 3];
            let mut wt = 1.0;
            for xk in xi.iter_mut().take(dim) {
                *xk = x[k % n];
                wt *= w[k % n];
                k /= n;
            }
            (xi, wt)
        })
        .collect()
}

/// Cholesky-based inverse of the leading `dim x dim` block; `None` when a
/// pivot is not positive.
fn spd_inverse(k: &Mat3, dim: usize) -> Option<Mat3> {
    let mut l = [[0.0; 3]; 3];
    for i in 0..dim {
        for j in 0..=i {
            let s: f64 = k[i][j] - (0..j).map(|m| l[i][m] * l[j][m]).sum::<f64>();
            if i == j {
                if !(s > 0.0) {
                    return None;
                }
                l[i][i] = s.sqrt();
            } else {
                l[i][j] = s / l[j][j];
            }
        }
    }
    let mut inv = [[0.0; 3]; 3];
    for col in 0..dim {
        let mut y = [0.0; 3];
        for i in 0..dim {
            let b = if i == col { 1.0 } else { 0.0 };
            y[i] = (b - (0..i).map(|m| l[i][m] * y[m]).sum::<f64>()) / l[i][i];
        }
        let mut x = [0.0; 3];
        for i in (0..dim).rev() {
            x[i] = (y[i] - (i + 1..dim).map(|m| l[m][i] * x[m]).sum::<f64>()) / l[i][i];
        }
        for i in 0..dim {
            inv[i][col] = x[i];
        }
    }
    // exact symmetry from the upper triangle
    for i in 0..dim {
        for j in 0..i {
            inv[i][j] = inv[j][i];
        }
    }
    Some(inv)
}

#[inline]
fn shape(side: usize, xi: f64) -> f64 {
    if side == 0 {
        1.0 - xi
    } else {
        xi
    }
}

/// Element mass and divergence matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalMatrices {
    /// `a[i][j] = int (K^-1 phi_j) . phi_i`, `2d x 2d` used.
    pub a: [[f64; 6]; 6],
    /// `b[j] = int div phi_j = +-h^(d-1)`.
    pub b: [f64; 6],
}

/// Local RT0 matrices with 2-point tensor Gauss quadrature.
pub fn local_element_matrices(
    element: &Element,
    dim: usize,
    conductivity: &ConductivityField,
) -> Result<LocalMatrices> {
    let h = element.side();
    let corner = element.lower_corner();
    let vol = h.powi(dim as i32);
    let nloc = 2 * dim;
    let mut a = [[0.0; 6]; 6];
    for (xi, w) in tensor_rule(dim, 2) {
        let mut x = [0.0; 3];
        for k in 0..dim {
            x[k] = corner[k] + h * xi[k];
        }
        let kinv = spd_inverse(&conductivity.eval(&x, dim), dim).ok_or(SaddleError::ConductivityNotSpd {
            x: x[0],
            y: x[1],
            z: x[2],
        })?;
        let mut psi = [0.0; 6];
        for (i, p) in psi.iter_mut().enumerate().take(nloc) {
            *p = shape(i % 2, xi[i / 2]);
        }
        for i in 0..nloc {
            for j in i..nloc {
                a[i][j] += w * vol * kinv[i / 2][j / 2] * psi[i] * psi[j];
            }
        }
    }
    for i in 0..nloc {
        for j in 0..i {
            a[i][j] = a[j][i];
        }
    }
    let mut b = [0.0; 6];
    let face = h.powi(dim as i32 - 1);
    for (j, bj) in b.iter_mut().enumerate().take(nloc) {
        *bj = if j % 2 == 0 { -face } else { face };
    }
    Ok(LocalMatrices { a, b })
}

/// Assembled system `[[A, Bᵀ], [B, -C]] [u; p] = [rhs_u; rhs_p]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SaddleSystem {
    pub a: CsrMatrix,
    pub b: CsrMatrix,
    pub c: CsrMatrix,
    pub rhs_u: Vec<f64>,
    pub rhs_p: Vec<f64>,
    /// Values of the eliminated Neumann flux dofs, by prescribed slot.
    pub prescribed: Vec<f64>,
}

impl SaddleSystem {
    pub fn n_u(&self) -> usize {
        self.a.rows()
    }

    pub fn n_p(&self) -> usize {
        self.b.rows()
    }

    pub fn rhs(&self) -> Vec<f64> {
        let mut r = self.rhs_u.clone();
        r.extend_from_slice(&self.rhs_p);
        r
    }

    /// Writes `A.mtx`, `B.mtx`, `rhs_u.txt`, `rhs_p.txt` into `dir`.
    pub fn dump(&self, dir: &std::path::Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        let open = |name: &str| -> Result<std::io::BufWriter<std::fs::File>> {
            Ok(std::io::BufWriter::new(std::fs::File::create(dir.join(name))?))
        };
        io::write_matrix_market(&self.a, open("A.mtx")?)?;
        io::write_matrix_market(&self.b, open("B.mtx")?)?;
        io::write_vector(&self.rhs_u, open("rhs_u.txt")?)?;
        let mut w = open("rhs_p.txt")?;
        io::write_vector(&self.rhs_p, &mut w)?;
        w.flush()?;
        Ok(())
    }
}

/// Value of the exact normal flux at the center of face `face`.
fn face_flux(dofs: &DofMap, problem: &ManufacturedProblem, face: usize) -> f64 {
    let f = &dofs.faces()[face];
    problem.flux(&f.center)[f.axis]
}

/// Prescribed Neumann values, one per prescribed slot.
pub fn prescribed_values(dofs: &DofMap, problem: &ManufacturedProblem) -> Vec<f64> {
    dofs.prescribed_faces().iter().map(|&f| face_flux(dofs, problem, f)).collect()
}

fn check_dofs(mesh: &AdaptiveMesh, dofs: &DofMap) -> Result<()> {
    if dofs.n_p() != mesh.num_leaves() || dofs.dim() != mesh.dim() {
        return Err(SaddleError::DofMapMismatch(format!(
            "dof map has {} pressures in {}D, mesh has {} leaves in {}D",
            dofs.n_p(),
            dofs.dim(),
            mesh.num_leaves(),
            mesh.dim()
        )));
    }
    Ok(())
}

/// Assembles `A`, `B`, and both right-hand sides. Hanging faces contribute
/// to their master's unknown; Neumann faces are eliminated and their
/// prescribed values moved to the right-hand side.
pub fn assemble_system(mesh: &AdaptiveMesh, dofs: &DofMap, problem: &ManufacturedProblem) -> Result<SaddleSystem> {
    check_dofs(mesh, dofs)?;
    let dim = mesh.dim();
    let nloc = 2 * dim;
    let (n_u, n_p) = (dofs.n_u(), dofs.n_p());
    let prescribed = prescribed_values(dofs, problem);
    let mut a_trip = Vec::with_capacity(mesh.num_leaves() * nloc * nloc);
    let mut b_trip = Vec::with_capacity(mesh.num_leaves() * nloc);
    let mut rhs_u = vec![0.0; n_u];
    let mut rhs_p = vec![0.0; n_p];
    let cell_rule = tensor_rule(dim, 2);
    let face_rule = tensor_rule(dim - 1, 2);

    for (ei, e) in mesh.leaves().iter().enumerate() {
        let loc = local_element_matrices(e, dim, &problem.conductivity)?;
        let slots: Vec<FluxSlot> = (0..nloc).map(|i| dofs.element_slot(ei, i)).collect();
        for i in 0..nloc {
            let FluxSlot::Free(gi) = slots[i] else { continue };
            for j in 0..nloc {
                match slots[j] {
                    FluxSlot::Free(gj) => a_trip.push((gi, gj, loc.a[i][j])),
                    FluxSlot::Prescribed(k) => rhs_u[gi] -= loc.a[i][j] * prescribed[k],
                }
            }
        }
        let pe = dofs.pressure_index(ei);
        for j in 0..nloc {
            match slots[j] {
                FluxSlot::Free(gj) => b_trip.push((pe, gj, loc.b[j])),
                FluxSlot::Prescribed(k) => rhs_p[pe] -= loc.b[j] * prescribed[k],
            }
        }

        // -int_e f
        let h = e.side();
        let corner = e.lower_corner();
        let vol = h.powi(dim as i32);
        let mut src = 0.0;
        for (xi, w) in &cell_rule {
            let mut x = [0.0; 3];
            for k in 0..dim {
                x[k] = corner[k] + h * xi[k];
            }
            src += w * problem.source(&x);
        }
        rhs_p[pe] -= vol * src;

        // Dirichlet data: int p0 (phi . n) over boundary faces
        for axis in 0..dim {
            for side in 0..2 {
                let face = dofs.element_face(ei, 2 * axis + side);
                if dofs.faces()[face].status != FaceStatus::Dirichlet {
                    continue;
                }
                let FluxSlot::Free(gi) = slots[2 * axis + side] else {
                    continue;
                };
                let tangential: Vec<usize> = (0..dim).filter(|&k| k != axis).collect();
                let mut integral = 0.0;
                for (eta, w) in &face_rule {
                    let mut x = corner;
                    x[axis] = corner[axis] + side as f64 * h;
                    for (t, &k) in tangential.iter().enumerate() {
                        x[k] = corner[k] + h * eta[t];
                    }
                    integral += w * problem.pressure(&x);
                }
                let sign = if side == 0 { -1.0 } else { 1.0 };
                rhs_u[gi] += sign * h.powi(dim as i32 - 1) * integral;
            }
        }
    }

    Ok(SaddleSystem {
        a: CsrMatrix::from_triplets(n_u, n_u, &a_trip)?,
        b: CsrMatrix::from_triplets(n_p, n_u, &b_trip)?,
        c: CsrMatrix::zeros(n_p, n_p),
        rhs_u,
        rhs_p,
        prescribed,
    })
}

/// Face-center normal fluxes and cell-center pressures of the exact solution.
pub fn project_exact(problem: &ManufacturedProblem, mesh: &AdaptiveMesh, dofs: &DofMap) -> (Vec<f64>, Vec<f64>) {
    let u = (0..dofs.n_u()).map(|i| face_flux(dofs, problem, dofs.free_face(i))).collect();
    let p = mesh
        .leaves()
        .iter()
        .map(|e| problem.pressure(&e.centroid(mesh.dim())))
        .collect();
    (u, p)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorReport {
    pub l2_u: f64,
    pub l2_p: f64,
    pub h1broken_u: f64,
}

/// L2 errors of flux and pressure and the broken H1 seminorm of the flux
/// error, with 3-point tensor Gauss quadrature per element.
pub fn evaluate_errors(
    mesh: &AdaptiveMesh,
    dofs: &DofMap,
    u_h: &[f64],
    p_h: &[f64],
    problem: &ManufacturedProblem,
) -> Result<ErrorReport> {
    check_dofs(mesh, dofs)?;
    if u_h.len() != dofs.n_u() {
        return Err(SaddleError::DimensionMismatch {
            op: "flux solution",
            expected: dofs.n_u(),
            got: u_h.len(),
        });
    }
    if p_h.len() != dofs.n_p() {
        return Err(SaddleError::DimensionMismatch {
            op: "pressure solution",
            expected: dofs.n_p(),
            got: p_h.len(),
        });
    }
    let dim = mesh.dim();
    let prescribed = prescribed_values(dofs, problem);
    let rule = tensor_rule(dim, 3);
    let (mut eu, mut ep, mut eh) = (0.0, 0.0, 0.0);
    for (ei, e) in mesh.leaves().iter().enumerate() {
        let h = e.side();
        let corner = e.lower_corner();
        let vol = h.powi(dim as i32);
        let mut vals = [0.0; 6];
        for (i, v) in vals.iter_mut().enumerate().take(2 * dim) {
            *v = match dofs.element_slot(ei, i) {
                FluxSlot::Free(g) => u_h[g],
                FluxSlot::Prescribed(k) => prescribed[k],
            };
        }
        let ph = p_h[dofs.pressure_index(ei)];
        for (xi, w) in &rule {
            let mut x = [0.0; 3];
            for k in 0..dim {
                x[k] = corner[k] + h * xi[k];
            }
            let u = problem.flux(&x);
            let jac = problem.flux_jacobian(&x);
            for a in 0..dim {
                let uh = vals[2 * a] * (1.0 - xi[a]) + vals[2 * a + 1] * xi[a];
                eu += w * vol * (uh - u[a]).powi(2);
                for q in 0..dim {
                    let duh = if q == a { (vals[2 * a + 1] - vals[2 * a]) / h } else { 0.0 };
                    eh += w * vol * (duh - jac[a][q]).powi(2);
                }
            }
            ep += w * vol * (ph - problem.pressure(&x)).powi(2);
        }
    }
    Ok(ErrorReport {
        l2_u: eu.sqrt(),
        l2_p: ep.sqrt(),
        h1broken_u: eh.sqrt(),
    })
}
