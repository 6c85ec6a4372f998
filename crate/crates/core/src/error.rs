use num_complex::Complex64;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Failure categories, used by front ends to pick an exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Bad input: unparsable documents, invalid parameters, violated preconditions.
    Input,
    /// A numerical procedure failed to reach its tolerance.
    Numeric,
    /// A curvature bound was violated.
    BoundViolation,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("point {z} lies outside the admissible radius {radius}")]
    RadiusViolation { z: Complex64, radius: f64 },

    #[error("series argument |x| = {modulus} is outside the convergence guard {guard}")]
    DivergenceGuard { modulus: f64, guard: f64 },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("{what} did not converge: {detail}")]
    NonConvergence { what: &'static str, detail: String },

    #[error("degenerate configuration: {0}")]
    Degenerate(String),

    #[error("square root branch obstruction: {0}")]
    BranchObstruction(String),

    #[error("vanishing order {0} is odd, no single-valued square root")]
    OddVanishingOrder(usize),

    #[error("premise violated: {0}")]
    Premise(String),

    #[error("bound violated: {0}")]
    BoundViolation(String),

    #[error("malformed document: {0}")]
    Parse(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::RadiusViolation { .. }
            | Error::DivergenceGuard { .. }
            | Error::Parameter(_)
            | Error::OddVanishingOrder(_)
            | Error::Premise(_)
            | Error::Parse(_)
            | Error::Io(_) => ErrorKind::Input,
            Error::NonConvergence { .. } | Error::Degenerate(_) | Error::BranchObstruction(_) => {
                ErrorKind::Numeric
            }
            Error::BoundViolation(_) => ErrorKind::BoundViolation,
        }
    }

    pub(crate) fn radius(z: Complex64, radius: f64) -> Self {
        Error::RadiusViolation { z, radius }
    }
}
