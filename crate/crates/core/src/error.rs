use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ChartError {
    #[error("chart has no coordinates")]
    Empty,
    #[error("chart dimension {dim} exceeds the limit {limit}")]
    TooLarge { dim: usize, limit: usize },
    #[error("invalid coordinate name {0:?}")]
    InvalidName(String),
    #[error("duplicate coordinate {0:?}")]
    DuplicateCoordinate(String),
    #[error("coordinate {name:?} does not belong to chart {chart:?}")]
    UnknownCoordinate { name: String, chart: String },
    #[error("objects live on different charts")]
    Mismatch,
    #[error("expression references coordinate index {index} outside a chart of dimension {dim}")]
    OutOfRange { index: usize, dim: usize },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("negative radicand {0}")]
    NegativeRadicand(f64),
    #[error("non-finite value")]
    NonFinite,
    #[error("no instantiation for function symbol {0:?}")]
    MissingFunction(String),
    #[error("coordinate index {0} out of range for the evaluation point")]
    CoordinateOutOfRange(usize),
}

impl EvalError {
    /// True for errors caused by the location of the point rather than by
    /// the expression or the environment.
    pub fn is_singularity(&self) -> bool {
        matches!(self, EvalError::DivisionByZero | EvalError::NegativeRadicand(_) | EvalError::NonFinite)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("inconclusive: all {samples} samples hit singularities")]
    Inconclusive { samples: usize },
    #[error("sample {sample} stayed singular after {attempts} resamples (last point {point:?}: {cause})")]
    Singular { sample: usize, attempts: usize, point: Vec<f64>, cause: EvalError },
    #[error(transparent)]
    Eval(EvalError),
    #[error(transparent)]
    Chart(#[from] ChartError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("unknown identifier {name:?} at line {line}, column {column}")]
    UnknownIdentifier { name: String, line: usize, column: usize },
}

/// Errors raised by the geometric layers (forms, brackets, structures).
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error(transparent)]
    Chart(#[from] ChartError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error("degree mismatch: expected {expected}, found {found}")]
    Degree { expected: usize, found: usize },
    #[error("level mismatch: {0} vs {1}")]
    Level(usize, usize),
    #[error("operation requires level {expected}, got {found}")]
    LevelRequired { expected: usize, found: usize },
    #[error("twisting form is not closed")]
    NotClosed,
    #[error("2-form is degenerate on the sampling box")]
    Degenerate,
    #[error("no Hamiltonian vector field: the linear system is inconsistent")]
    NotSolvable,
    #[error("solver residual is nonzero: {0}")]
    Residual(String),
    #[error("invalid argument: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LieError {
    #[error("dimension must be positive")]
    EmptyAlgebra,
    #[error("{0} has wrong shape")]
    Shape(&'static str),
    #[error("structure constants are not antisymmetric at ({i}, {j}, {k})")]
    NotAntisymmetric { i: usize, j: usize, k: usize },
    #[error("Jacobi identity fails at ({i}, {j}, {k}, {l})")]
    Jacobi { i: usize, j: usize, k: usize, l: usize },
    #[error("bilinear form is not symmetric at ({i}, {j})")]
    NotSymmetric { i: usize, j: usize },
    #[error("bilinear form is degenerate")]
    Degenerate,
    #[error("bilinear form is not ad-invariant at ({i}, {j}, {k}); the Cartan 3-form would not be alternating")]
    NotInvariant { i: usize, j: usize, k: usize },
    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
}
