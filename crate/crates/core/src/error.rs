use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("symbol evaluated at z = 0")]
    ZeroArgument,
    #[error("dimension mismatch in {op}: expected {expected}, found {found}")]
    DimensionMismatch {
        op: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("{op} needs a square matrix, got {rows}x{cols}")]
    NotSquare {
        op: &'static str,
        rows: usize,
        cols: usize,
    },
    #[error("not divisible: least-squares residual {residual:e}")]
    NotDivisible { residual: f64 },
    #[error("singular system: {0}")]
    Singular(&'static str),
    #[error("ill-conditioned {what}: condition estimate {condition:e}")]
    IllConditioned { what: &'static str, condition: f64 },
    #[error("invalid space: {0}")]
    InvalidSpace(&'static str),
    #[error("duplicate frequency {0}")]
    DuplicateFrequency(f64),
    #[error("unsupported: {0}")]
    Unsupported(&'static str),
    #[error("check window half-width {given} is below the required {required}")]
    WindowTooSmall { given: usize, required: usize },
    #[error("not an annihilator: scaled residual {residual:e}")]
    NotAnnihilator { residual: f64 },
    #[error("spectral condition fails: scaled residual {residual:e}")]
    SpectralConditionFailed { residual: f64 },
    #[error("window exhausted at level {level}: needs {deficit} more samples")]
    WindowExhausted { level: u32, deficit: usize },
}
