//! Benchmark cases: the four manufactured examples on uniform and adaptive
//! meshes, one solver run per case, and refinement studies.

use std::fmt;
use std::io::Write;
use std::str::FromStr;
use std::time::Instant;

use serde::Serialize;

use crate::discretize::{assemble_system, evaluate_errors, BumpParams, ErrorReport, ManufacturedProblem, SaddleSystem};
use crate::error::{Result, SaddleError};
use crate::krylov::{gmres, Preconditioner, PreconditionerKind, SolveReport, DEFAULT_MAXIT, DEFAULT_TOL};
use crate::mesh::{build_uniform, enumerate_dofs, refine, AdaptiveMesh, BallRadius, DofMap, RefinementCriterion};
use crate::spamg::SaddleMatrix;

/// Ball radius used by the adaptive examples 1-3, as a multiple of the
/// cell side. Chosen so that the refined region shrinks with the cell size
/// and the extra levels stay a local patch around the domain center.
pub const DEFAULT_BALL_FACTOR: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeshMode {
    Uniform { level: u32 },
    /// Uniform `base` level, refined by the example's criterion up to `max`.
    Adaptive { base: u32, max: u32 },
}

impl MeshMode {
    pub fn level_min(&self) -> u32 {
        match *self {
            MeshMode::Uniform { level } => level,
            MeshMode::Adaptive { base, .. } => base,
        }
    }

    pub fn level_max(&self) -> u32 {
        match *self {
            MeshMode::Uniform { level } => level,
            MeshMode::Adaptive { max, .. } => max,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            MeshMode::Uniform { .. } => "uniform",
            MeshMode::Adaptive { .. } => "adaptive",
        }
    }
}

impl fmt::Display for MeshMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            MeshMode::Uniform { level } => write!(f, "uniform {level}"),
            MeshMode::Adaptive { base, max } => write!(f, "adaptive {base}-{max}"),
        }
    }
}

/// Example 0 is the zero-solution problem used by tests.
#[derive(Debug, Clone, PartialEq)]
pub struct CaseSpec {
    pub example: u8,
    pub dim: usize,
    pub mesh: MeshMode,
    pub preconditioner: PreconditionerKind,
    pub tol: f64,
    pub maxit: usize,
    pub bump: BumpParams,
    pub ball_factor: f64,
    /// When false, setup/solve seconds are reported as 0 so that the CSV
    /// output is byte-for-byte reproducible.
    pub record_timings: bool,
}

pub fn default_bump(dim: usize, contrast: f64) -> BumpParams {
    let mut center = [0.0; 3];
    center.iter_mut().take(dim).for_each(|c| *c = 0.5);
    BumpParams {
        center,
        inner: 0.125,
        outer: 0.25,
        contrast,
    }
}

impl CaseSpec {
    pub fn new(example: u8, dim: usize, mesh: MeshMode, preconditioner: PreconditionerKind) -> Self {
        CaseSpec {
            example,
            dim,
            mesh,
            preconditioner,
            tol: DEFAULT_TOL,
            maxit: DEFAULT_MAXIT,
            bump: default_bump(dim, 0.999),
            ball_factor: DEFAULT_BALL_FACTOR,
            record_timings: true,
        }
    }

    pub fn uniform(example: u8, dim: usize, level: u32, pc: PreconditionerKind) -> Self {
        Self::new(example, dim, MeshMode::Uniform { level }, pc)
    }

    /// Adaptive case labelled `base-max`.
    pub fn adaptive(example: u8, dim: usize, base: u32, max: u32, pc: PreconditionerKind) -> Self {
        Self::new(example, dim, MeshMode::Adaptive { base, max }, pc)
    }

    pub fn with_contrast(mut self, contrast: f64) -> Self {
        self.bump.contrast = contrast;
        self
    }

    pub fn without_timings(mut self) -> Self {
        self.record_timings = false;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.example > 4 {
            return Err(SaddleError::InvalidCase(format!("unknown example {}", self.example)));
        }
        if self.dim != 2 && self.dim != 3 {
            return Err(SaddleError::UnsupportedDimension(self.dim));
        }
        if !(self.tol > 0.0 && self.tol < 1.0) {
            return Err(SaddleError::InvalidCase(format!("tolerance {} not in (0, 1)", self.tol)));
        }
        if self.maxit == 0 {
            return Err(SaddleError::InvalidCase("maxit must be positive".into()));
        }
        if let MeshMode::Adaptive { base, max } = self.mesh {
            if max < base {
                return Err(SaddleError::InvalidCase(format!("adaptive levels {base}-{max} decrease")));
            }
        }
        if self.example == 4 {
            let b = &self.bump;
            if !(0.0..1.0).contains(&b.contrast) {
                return Err(SaddleError::InvalidCase(format!("contrast {} not in [0, 1)", b.contrast)));
            }
            if !(b.inner > 0.0 && b.inner < b.outer) {
                return Err(SaddleError::InvalidCase(format!("ring radii {} .. {}", b.inner, b.outer)));
            }
        }
        Ok(())
    }

    pub fn problem(&self) -> Result<ManufacturedProblem> {
        self.validate()?;
        Ok(match self.example {
            0 => ManufacturedProblem::zero(self.dim),
            1 => ManufacturedProblem::example1(self.dim),
            2 => ManufacturedProblem::example2(self.dim),
            3 => ManufacturedProblem::example3(self.dim),
            _ => ManufacturedProblem::example4(self.dim, self.bump),
        })
    }

    pub fn build_mesh(&self) -> Result<AdaptiveMesh> {
        self.validate()?;
        match self.mesh {
            MeshMode::Uniform { level } => build_uniform(self.dim, level),
            MeshMode::Adaptive { base, max } => {
                let coarse = build_uniform(self.dim, base)?;
                let criterion = if self.example == 4 {
                    RefinementCriterion::RingOverlap {
                        center: self.bump.center,
                        inner: self.bump.inner,
                        outer: self.bump.outer,
                        target_level: max,
                    }
                } else {
                    let mut center = [0.0; 3];
                    center.iter_mut().take(self.dim).for_each(|c| *c = 0.5);
                    RefinementCriterion::Ball {
                        center,
                        radius: BallRadius::SideMultiple(self.ball_factor),
                        extra_levels: max - base,
                    }
                };
                Ok(refine(&coarse, &criterion))
            }
        }
    }
}

/// Everything needed to solve one case.
#[derive(Debug, Clone)]
pub struct Case {
    pub mesh: AdaptiveMesh,
    pub dofs: DofMap,
    pub problem: ManufacturedProblem,
    pub system: SaddleSystem,
}

impl Case {
    pub fn saddle_matrix(&self) -> Result<SaddleMatrix> {
        SaddleMatrix::new(self.system.a.clone(), self.system.b.clone(), self.system.c.clone())
    }
}

pub fn build_case(spec: &CaseSpec) -> Result<Case> {
    let problem = spec.problem()?;
    let mesh = spec.build_mesh()?;
    let dofs = enumerate_dofs(&mesh, problem.boundary)?;
    let system = assemble_system(&mesh, &dofs, &problem)?;
    Ok(Case {
        mesh,
        dofs,
        problem,
        system,
    })
}

/// One CSV line of a benchmark report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRow {
    pub example: u8,
    pub dim: usize,
    pub mesh: String,
    pub level_min: u32,
    pub level_max: u32,
    pub preconditioner: String,
    pub n_u: usize,
    pub n_p: usize,
    pub iterations: usize,
    pub converged: bool,
    pub l2_u: f64,
    pub l2_p: f64,
    pub h1broken_u: f64,
    pub setup_seconds: f64,
    pub solve_seconds: f64,
    /// Empty on success.
    pub error: String,
}

impl ReportRow {
    fn empty(spec: &CaseSpec) -> Self {
        ReportRow {
            example: spec.example,
            dim: spec.dim,
            mesh: spec.mesh.name().to_string(),
            level_min: spec.mesh.level_min(),
            level_max: spec.mesh.level_max(),
            preconditioner: spec.preconditioner.id().to_string(),
            n_u: 0,
            n_p: 0,
            iterations: 0,
            converged: false,
            l2_u: f64::NAN,
            l2_p: f64::NAN,
            h1broken_u: f64::NAN,
            setup_seconds: 0.0,
            solve_seconds: 0.0,
            error: String::new(),
        }
    }

    pub fn failed(&self) -> bool {
        !self.error.is_empty()
    }
}

/// Full output of a run, for callers that need more than the CSV row.
#[derive(Debug, Clone)]
pub struct CaseOutcome {
    pub row: ReportRow,
    pub case: Case,
    pub u: Vec<f64>,
    pub p: Vec<f64>,
    pub report: SolveReport,
}

/// Builds, solves and evaluates. Errors after validation end up in the row.
pub fn run_case(spec: &CaseSpec) -> Result<ReportRow> {
    spec.validate()?;
    match solve_case(spec) {
        Ok(out) => Ok(out.row),
        Err(e) => {
            let mut row = ReportRow::empty(spec);
            row.error = e.to_string();
            Ok(row)
        }
    }
}

pub fn solve_case(spec: &CaseSpec) -> Result<CaseOutcome> {
    let case = build_case(spec)?;
    let mut row = ReportRow::empty(spec);
    row.n_u = case.system.n_u();
    row.n_p = case.system.n_p();
    let m = case.saddle_matrix()?;
    let t0 = Instant::now();
    let pc = Preconditioner::setup(spec.preconditioner, &m)?;
    let setup = t0.elapsed().as_secs_f64();
    let (x, mut report) = gmres(&m, &pc, &case.system.rhs(), spec.tol, spec.maxit)?;
    report.setup_seconds = setup;
    let (u, p) = x.split_at(row.n_u);
    let ErrorReport { l2_u, l2_p, h1broken_u } = evaluate_errors(&case.mesh, &case.dofs, u, p, &case.problem)?;
    row.iterations = report.iterations;
    row.converged = report.converged;
    row.l2_u = l2_u;
    row.l2_p = l2_p;
    row.h1broken_u = h1broken_u;
    if spec.record_timings {
        row.setup_seconds = report.setup_seconds;
        row.solve_seconds = report.solve_seconds;
    }
    Ok(CaseOutcome {
        row,
        u: u.to_vec(),
        p: p.to_vec(),
        case,
        report,
    })
}

pub fn write_rows<W: Write>(rows: &[ReportRow], w: W) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    for r in rows {
        wr.serialize(r)?;
    }
    wr.flush()?;
    Ok(())
}

/// Least-squares slope of `-log2(error)` against the level; `None` when
/// any error is zero or non-finite.
pub fn fit_rate(levels: &[u32], errors: &[f64]) -> Option<f64> {
    if levels.len() != errors.len() || levels.len() < 2 {
        return None;
    }
    if errors.iter().any(|e| !(e.is_finite() && *e > 0.0)) {
        return None;
    }
    let n = levels.len() as f64;
    let xs: Vec<f64> = levels.iter().map(|&l| l as f64).collect();
    let ys: Vec<f64> = errors.iter().map(|e| -e.log2()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx == 0.0 {
        return None;
    }
    Some(sxy / sxx)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceStudy {
    pub rows: Vec<ReportRow>,
    pub rate_u: Option<f64>,
    pub rate_p: Option<f64>,
}

impl ConvergenceStudy {
    pub fn levels(&self) -> Vec<u32> {
        self.rows.iter().map(|r| r.level_max).collect()
    }
}

/// Runs `template` on every level in `levels` (the level of a uniform mesh,
/// or the base level of an adaptive one, keeping the number of extra
/// levels) and fits rates against the finest level.
pub fn convergence_study(template: &CaseSpec, levels: std::ops::RangeInclusive<u32>) -> Result<ConvergenceStudy> {
    let levels: Vec<u32> = levels.collect();
    if levels.len() < 3 {
        return Err(SaddleError::InvalidCase(format!(
            "a convergence study needs at least 3 levels, got {}",
            levels.len()
        )));
    }
    let mut rows = Vec::with_capacity(levels.len());
    for &l in &levels {
        let mut spec = template.clone();
        spec.mesh = match template.mesh {
            MeshMode::Uniform { .. } => MeshMode::Uniform { level: l },
            MeshMode::Adaptive { base, max } => MeshMode::Adaptive { base: l, max: l + (max - base) },
        };
        rows.push(run_case(&spec)?);
    }
    let lv: Vec<u32> = rows.iter().map(|r| r.level_max).collect();
    let eu: Vec<f64> = rows.iter().map(|r| r.l2_u).collect();
    let ep: Vec<f64> = rows.iter().map(|r| r.l2_p).collect();
    Ok(ConvergenceStudy {
        rate_u: fit_rate(&lv, &eu),
        rate_p: fit_rate(&lv, &ep),
        rows,
    })
}

impl FromStr for MeshMode {
    type Err = SaddleError;

    /// `uniform:L` or `adaptive:B-M`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || SaddleError::Parse(format!("mesh mode '{s}'; expected uniform:L or adaptive:B-M"));
        let (kind, rest) = s.split_once(':').ok_or_else(bad)?;
        match kind {
            "uniform" => Ok(MeshMode::Uniform {
                level: rest.parse().map_err(|_| bad())?,
            }),
            "adaptive" => {
                let (b, m) = rest.split_once('-').ok_or_else(bad)?;
                Ok(MeshMode::Adaptive {
                    base: b.parse().map_err(|_| bad())?,
                    max: m.parse().map_err(|_| bad())?,
                })
            }
            _ => Err(bad()),
        }
    }
}
