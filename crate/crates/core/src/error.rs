use std::fmt;

/// Errors produced by matrix construction, I/O, solvers, and preconditioners.
#[derive(Debug)]
pub enum Error {
    /// Vector or matrix dimensions do not conform.
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    /// A NaN or infinity appeared where a finite value is required.
    NonFinite { what: &'static str },
    /// Matrix Market parse failure, with the 1-based offending line.
    Parse { line: usize, msg: String },
    /// Structural invariant violated while building a matrix.
    InvalidMatrix(String),
    /// A parameter is outside its admissible range.
    InvalidParam(String),
    /// Hard breakdown inside a solver iteration.
    Breakdown { solver: &'static str, msg: String },
    /// p'Ap <= 0 observed: the matrix is not positive definite on the
    /// generated Krylov space.
    NotSpd { iteration: usize },
    /// A column (or row) of the matrix is identically zero.
    ZeroDiagonal { index: usize, axis: &'static str },
    /// Incomplete Cholesky broke down even after diagonal-shift retries.
    FactorizationFailed(String),
    /// Problem exceeds the dense desk-scale cap of the oracle.
    DeskScaleExceeded { dim: usize, cap: usize },
    Io(std::io::Error),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DimensionMismatch {
                what,
                expected,
                got,
            } => write!(f, "{what}: dimension mismatch (expected {expected}, got {got})"),
            Error::NonFinite { what } => write!(f, "{what}: non-finite value"),
            Error::Parse { line, msg } => write!(f, "parse error at line {line}: {msg}"),
            Error::InvalidMatrix(msg) => write!(f, "invalid matrix: {msg}"),
            Error::InvalidParam(msg) => write!(f, "invalid parameter: {msg}"),
            Error::Breakdown { solver, msg } => write!(f, "{solver}: breakdown: {msg}"),
            Error::NotSpd { iteration } => {
                write!(f, "matrix not SPD on Krylov space (iteration {iteration})")
            }
            Error::ZeroDiagonal { index, axis } => {
                write!(f, "{axis} {index} of the matrix is identically zero")
            }
            Error::FactorizationFailed(msg) => write!(f, "incomplete Cholesky failed: {msg}"),
            Error::DeskScaleExceeded { dim, cap } => write!(
                f,
                "problem dimension {dim} exceeds the dense oracle cap {cap}; subsample the instance"
            ),
            Error::Io(e) => write!(f, "I/O error: {e}"),
        }
    }
}

impl std::error::Error for Error {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            Error::Io(e) => Some(e),
            _ => None,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e)
    }
}

pub type Result<T> = std::result::Result<T, Error>;
