use thiserror::Error;

use crate::mass_model::RangeClass;

pub type Result<T, E = GhoError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum GhoError {
    #[error("mass is not positive at x = {x} (m = {m})")]
    NonPositiveMass { x: f64, m: f64 },

    #[error("missing parameter `{0}`")]
    MissingParam(&'static str),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParam { name: String, reason: String },

    #[error("singular domain: {0}")]
    SingularDomain(String),

    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("x = {x} lies outside the domain [{lo}, {hi}]")]
    OutOfDomain { x: f64, lo: f64, hi: f64 },

    #[error("invalid mass profile: {0}")]
    InvalidProfile(String),

    #[error("adaptive quadrature did not reach tolerance {tol:e} on [{a}, {b}]")]
    QuadratureFailure { a: f64, b: f64, tol: f64 },

    #[error("non-finite derivative stencil at x = {x}")]
    DerivativeFailure { x: f64 },

    #[error("Hermite degree {n} exceeds the supported maximum {max}")]
    DegreeTooLarge { n: usize, max: usize },

    #[error("no closed-form normalization for a bounded mu-range")]
    BoundedRangeUnsupported,

    #[error("grid with {n} points is too coarse (need at least {min})")]
    GridTooCoarse { n: usize, min: usize },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("operation requires a full-line mu-range, got {0:?}")]
    InadmissibleRange(RangeClass),

    #[error("coherent amplitude |z| = {modulus} needs more than {max} terms")]
    AmplitudeTooLarge { modulus: f64, max: usize },

    #[error("tolerance {0:e} outside (0, 1e-6]")]
    InvalidTolerance(f64),

    #[error("ordering parameters violate {0}")]
    InvalidOrdering(&'static str),

    #[error("eigensolver did not converge: {0}")]
    ConvergenceFailure(String),

    #[error("requested {requested} eigenvalues from a matrix of size {size}")]
    TooManyEigenvalues { requested: usize, size: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
