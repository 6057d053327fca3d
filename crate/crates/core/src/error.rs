use num_complex::Complex64;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Coarse classification used by drivers to pick an exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Bad input: out-of-domain parameters, malformed configurations.
    Input,
    /// The computation ran but could not certify or converge.
    Convergence,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("|s| = {modulus} is not > 1: outside the low-temperature phase")]
    PhaseViolation { modulus: f64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("gamma branch is ambiguous at cosh argument {w}: candidates {plus} and {minus}")]
    DegenerateBranch {
        w: Complex64,
        plus: Complex64,
        minus: Complex64,
    },

    #[error("no valid contour radius for s = {s} after {attempts} attempts (last margin {last_margin:e})")]
    NoValidRadius {
        s: Complex64,
        attempts: usize,
        last_margin: f64,
    },

    #[error("grid is not certified for s = {s}: {reason}")]
    InvalidGrid { s: Complex64, reason: String },

    #[error("evaluation needs {required} integrand calls, budget is {budget}")]
    BudgetExceeded { required: u128, budget: u64 },

    #[error("order {order} is not supported here ({supported})")]
    UnsupportedOrder { order: usize, supported: &'static str },

    #[error("matrix of size {m} is ill-conditioned: pivot magnitude {pivot:e}")]
    IllConditioned { m: usize, pivot: f64 },

    #[error("weight is near-singular: min |sinh gamma| = {min_sinh:e}")]
    NearCriticality { min_sinh: f64 },

    #[error("point {s0} is not on the unit circle (| |s0| - 1 | = {deviation:e})")]
    OffCircle { s0: Complex64, deviation: f64 },

    #[error("no singular factor is active at this configuration")]
    EmptyActiveSet,

    #[error("perturbation radius {epsilon} is not below the hull distance {distance}")]
    NoPositiveMargin { epsilon: f64, distance: f64 },

    #[error("level set cos(theta) + cos(phi) = {target} is empty")]
    EmptyLevelSet { target: f64 },
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::NoValidRadius { .. }
            | Error::BudgetExceeded { .. }
            | Error::IllConditioned { .. }
            | Error::NearCriticality { .. }
            | Error::DegenerateBranch { .. }
            | Error::NoPositiveMargin { .. } => ErrorKind::Convergence,
            _ => ErrorKind::Input,
        }
    }
}
