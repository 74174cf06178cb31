use thiserror::Error;

pub type Result<T> = std::result::Result<T, SaddleError>;

#[derive(Debug, Error)]
pub enum SaddleError {
    #[error("dimension mismatch in {op}: expected {expected}, got {got}")]
    DimensionMismatch {
        op: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("refinement level {level} outside supported range 0..={max}")]
    LevelOutOfRange { level: u32, max: u32 },

    #[error("unsupported dimension {0}; only 2 and 3 are supported")]
    UnsupportedDimension(usize),

    #[error("boundary specification has no Dirichlet face")]
    EmptyDirichletBoundary,

    #[error("dof map does not match mesh: {0}")]
    DofMapMismatch(String),

    #[error("conductivity is not positive definite at ({x:.6}, {y:.6}, {z:.6})")]
    ConductivityNotSpd { x: f64, y: f64, z: f64 },

    #[error("non-positive {what} at index {index}: {value:e}")]
    NonPositive {
        what: &'static str,
        index: usize,
        value: f64,
    },

    #[error("singular matrix in {context}: pivot {pivot} below tolerance")]
    Singular { context: String, pivot: usize },

    #[error("matrix not symmetric in {context}: relative asymmetry {asymmetry:e}")]
    NotSymmetric { context: String, asymmetry: f64 },

    #[error("coarsening stalled at level {level}: coarse fraction {fraction:.3}")]
    CoarseningStall { level: usize, fraction: f64 },

    #[error("F point {point} has strong connections but no interpolatory set")]
    NoInterpolatorySet { point: usize },

    #[error("coarse pressure block at level {level} is indefinite: min eigenvalue estimate {min_eig:e}")]
    IndefiniteCoarseBlock { level: usize, min_eig: f64 },

    #[error("non-finite value in GMRES with preconditioner {preconditioner}")]
    NonFinite { preconditioner: String },

    #[error("invalid case: {0}")]
    InvalidCase(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
