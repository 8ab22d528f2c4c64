use num_complex::Complex64;

/// Failure modes shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("no solution: {0}")]
    NoSolution(String),
    #[error("{what} did not converge (last residual {residual:.3e})")]
    Convergence { what: String, residual: f64 },
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("mu = {mu} lies outside the region required by {what}")]
    OutOfRegion { mu: Complex64, what: String },
    #[error("quadrature failure: {0}")]
    Quadrature(String),
    #[error("eigensolver failure: {0}")]
    Eigensolver(String),
    #[error("CFL violation: max|u|^p * n * dt = {courant:.3} exceeds {limit}")]
    Cfl { courant: f64, limit: f64 },
}

impl Error {
    /// Whether the error stems from caller input rather than from the numerics.
    pub fn is_usage(&self) -> bool {
        matches!(self, Error::InvalidInput(_) | Error::DimensionMismatch { .. } | Error::Cfl { .. })
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidInput(_) => "invalid_input",
            Error::NoSolution(_) => "no_solution",
            Error::Convergence { .. } => "convergence",
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::OutOfRegion { .. } => "out_of_region",
            Error::Quadrature(_) => "quadrature",
            Error::Eigensolver(_) => "eigensolver",
            Error::Cfl { .. } => "cfl",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}
