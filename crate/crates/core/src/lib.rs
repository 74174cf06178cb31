//! Mixed Poisson problems discretized with lowest-order Raviart-Thomas
//! elements on adaptive 2:1-balanced quadtree/octree meshes, and GMRES
//! preconditioners for the resulting saddle-point systems, including a
//! monolithic saddle-point algebraic multigrid.

pub mod amg;
pub mod discretize;
pub mod error;
pub mod harness;
pub mod krylov;
pub mod mesh;
pub mod sparse;
pub mod spamg;

pub use error::{Result, SaddleError};
