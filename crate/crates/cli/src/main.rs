use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use saddlemg_core::harness::{
    build_case, convergence_study, default_bump, run_case, write_rows, CaseSpec, MeshMode, ReportRow,
    DEFAULT_BALL_FACTOR,
};
use saddlemg_core::krylov::{PreconditionerKind, DEFAULT_MAXIT, DEFAULT_TOL};
use saddlemg_core::spamg::spamg_setup;

/// Mixed Poisson on adaptive quad/octree meshes, solved with GMRES and
/// saddle-point AMG.
#[derive(Debug, Parser)]
#[command(name = "saddlemg", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve one case per preconditioner and write a CSV report.
    Run {
        #[command(flatten)]
        case: CaseArgs,
        /// Preconditioner id, a comma-separated list, or `all`.
        #[arg(long, default_value = "spamg-vanka1")]
        pc: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Refinement study: one row per level and fitted error rates.
    Converge {
        #[command(flatten)]
        case: CaseArgs,
        /// Finest level of the study (uniform level or adaptive base).
        #[arg(long)]
        to: u32,
        #[arg(long, default_value = "spamg-vanka1")]
        pc: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write A, B and the right-hand sides in MatrixMarket/text form.
    DumpSystem {
        #[command(flatten)]
        case: CaseArgs,
        #[arg(long, default_value = "system")]
        dir: PathBuf,
        /// Also write the SPAMG hierarchy statistics (uzawa smoother).
        #[arg(long)]
        stats: bool,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MeshKind {
    Uniform,
    Adaptive,
}

#[derive(Debug, Args)]
struct CaseArgs {
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=4))]
    example: u8,
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u8).range(2..=3))]
    dim: u8,
    #[arg(long, value_enum, default_value_t = MeshKind::Uniform)]
    mesh: MeshKind,
    /// Uniform level, or base level of an adaptive mesh.
    #[arg(long)]
    level: u32,
    /// Finest level of an adaptive mesh [default: level + 3].
    #[arg(long)]
    max_level: Option<u32>,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    #[arg(long, default_value_t = DEFAULT_MAXIT)]
    maxit: usize,
    /// Contrast of the example-4 conductivity bump.
    #[arg(long, default_value_t = 0.999)]
    contrast: f64,
    /// Ball radius of the adaptive examples 1-3, in cell sides.
    #[arg(long, default_value_t = DEFAULT_BALL_FACTOR)]
    ball_factor: f64,
    /// Report zero timings, making the CSV reproducible byte for byte.
    #[arg(long)]
    no_timings: bool,
    /// Allow meshes beyond the desk-scale limits.
    #[arg(long)]
    large: bool,
}

impl CaseArgs {
    /// Desk-scale size limits on the finest level.
    fn check_limit(&self, finest: u32) -> Result<()> {
        let limit = match (self.dim, self.mesh) {
            (2, MeshKind::Uniform) => 8,
            (2, MeshKind::Adaptive) => 11,
            (_, MeshKind::Uniform) => 5,
            (_, MeshKind::Adaptive) => 8,
        };
        if finest > limit && !self.large {
            bail!("level {finest} exceeds the {}D limit {limit}; pass --large to allow it", self.dim);
        }
        Ok(())
    }

    fn spec(&self, pc: PreconditionerKind) -> Result<CaseSpec> {
        let dim = self.dim as usize;
        let mesh = match self.mesh {
            MeshKind::Uniform => {
                if self.max_level.is_some() {
                    bail!("--max-level only applies to adaptive meshes");
                }
                MeshMode::Uniform { level: self.level }
            }
            MeshKind::Adaptive => MeshMode::Adaptive {
                base: self.level,
                max: self.max_level.unwrap_or(self.level + 3),
            },
        };
        self.check_limit(mesh.level_max())?;
        let mut spec = CaseSpec::new(self.example, dim, mesh, pc);
        spec.tol = self.tol;
        spec.maxit = self.maxit;
        spec.bump = default_bump(dim, self.contrast);
        spec.ball_factor = self.ball_factor;
        spec.record_timings = !self.no_timings;
        spec.validate()?;
        Ok(spec)
    }
}

fn parse_pcs(list: &str) -> Result<Vec<PreconditionerKind>> {
    if list == "all" {
        return Ok(PreconditionerKind::ALL.to_vec());
    }
    list.split(',')
        .map(|s| s.trim().parse::<PreconditionerKind>().map_err(anyhow::Error::from))
        .collect()
}

fn output(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(io::stdout().lock()),
    })
}

/// Exit status for a finished report: 2 if any run failed or did not converge.
fn status(rows: &[ReportRow]) -> u8 {
    for r in rows.iter().filter(|r| !r.converged) {
        let why = if r.failed() { r.error.clone() } else { format!("no convergence in {} iterations", r.iterations) };
        eprintln!("{} {}D {} {}: {why}", r.example, r.dim, r.mesh, r.preconditioner);
    }
    if rows.iter().all(|r| r.converged) {
        0
    } else {
        2
    }
}

fn execute(cmd: Command) -> Result<u8> {
    match cmd {
        Command::Run { case, pc, out } => {
            let pcs = parse_pcs(&pc)?;
            let specs: Vec<CaseSpec> = pcs.into_iter().map(|k| case.spec(k)).collect::<Result<_>>()?;
            let mut rows = Vec::with_capacity(specs.len());
            for spec in &specs {
                rows.push(run_case(spec)?);
            }
            write_rows(&rows, output(&out)?)?;
            Ok(status(&rows))
        }
        Command::Converge { case, to, pc, out } => {
            let pcs = parse_pcs(&pc)?;
            let [pc] = pcs[..] else {
                bail!("converge takes a single preconditioner");
            };
            if to < case.level + 2 {
                bail!("a convergence study needs at least 3 levels ({}..={to})", case.level);
            }
            let template = case.spec(pc)?;
            let extra = template.mesh.level_max() - template.mesh.level_min();
            case.check_limit(to + extra)?;
            let study = convergence_study(&template, case.level..=to)?;
            write_rows(&study.rows, output(&out)?)?;
            let fmt = |r: Option<f64>| r.map_or("n/a".to_string(), |v| format!("{v:.3}"));
            eprintln!("rate l2_u: {}", fmt(study.rate_u));
            eprintln!("rate l2_p: {}", fmt(study.rate_p));
            Ok(status(&study.rows))
        }
        Command::DumpSystem { case, dir, stats } => {
            let spec = case.spec(PreconditionerKind::None)?;
            let built = build_case(&spec)?;
            built.system.dump(&dir)?;
            let mesh_path = dir.join("mesh.txt");
            built.mesh.dump(BufWriter::new(File::create(&mesh_path)?))?;
            if stats {
                let h = spamg_setup(&built.saddle_matrix()?, saddlemg_core::spamg::SmootherKind::Uzawa)?;
                h.write_stats(BufWriter::new(File::create(dir.join("hierarchy.csv"))?))?;
            }
            eprintln!(
                "wrote n_u = {}, n_p = {} to {}",
                built.system.n_u(),
                built.system.n_p(),
                dir.display()
            );
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
