//! Sparse and small dense kernels.

mod csr;
mod dense;
pub mod io;

pub use csr::{galerkin_product, lumped_inverse_diag, triple_product, CsrMatrix};
pub use dense::{dense_solve, DenseLu, PIVOT_TOLERANCE};

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// `y += alpha * x`
#[inline]
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}
