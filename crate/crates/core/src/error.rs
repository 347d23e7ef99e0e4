use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{what} did not converge within {iterations} iterations")]
    NonConvergence { what: &'static str, iterations: usize },

    #[error("advection speed must be positive, found a({x}) = {value}")]
    NonPositiveSpeed { x: f64, value: f64 },

    #[error("over-integration needs more than 3N/2 points: N = {degree}, Q = {points}")]
    QuadratureTooLow { degree: usize, points: usize },

    #[error("periodic central fluxes need a(x_min) = a(x_max), found {left} and {right}")]
    PeriodicSpeedMismatch { left: f64, right: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("element {element} has non-positive size {dx}")]
    DegenerateElement { element: usize, dx: f64 },

    #[error("time step {dt} exceeds the CFL limit {limit}")]
    CflViolation { dt: f64, limit: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}
