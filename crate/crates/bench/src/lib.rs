//! Fixtures shared by the benchmarks.

use saddlemg_core::harness::{build_case, CaseSpec};
use saddlemg_core::krylov::PreconditionerKind;
use saddlemg_core::spamg::SaddleMatrix;

/// Example-1 system and right-hand side on a uniform 2D mesh.
pub fn uniform_system(level: u32) -> (SaddleMatrix, Vec<f64>) {
    case_system(&CaseSpec::uniform(1, 2, level, PreconditionerKind::None))
}

/// Example-4 (high contrast) system on the ring-refined 2D mesh.
pub fn ring_system(base: u32, max: u32) -> (SaddleMatrix, Vec<f64>) {
    case_system(&CaseSpec::adaptive(4, 2, base, max, PreconditionerKind::None))
}

pub fn case_system(spec: &CaseSpec) -> (SaddleMatrix, Vec<f64>) {
    let case = build_case(spec).expect("benchmark case builds");
    let m = case.saddle_matrix().expect("valid saddle matrix");
    (m, case.system.rhs())
}
