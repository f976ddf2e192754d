use thiserror::Error;

/// Errors surfaced by the library.
///
/// `InvalidInput` covers anything a caller can fix by changing parameters;
/// the remaining variants are numerical failures.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("no physically admissible root: {0}")]
    NoAdmissibleRoot(String),

    #[error("Newton iteration did not converge after {iterations} iterations (last residual {residual:.3e})")]
    NewtonDivergence { iterations: usize, residual: f64 },

    #[error("Krylov exp-action did not converge (basis {basis}, estimate {estimate:.3e})")]
    KrylovDivergence { basis: usize, estimate: f64 },

    #[error("symmetry check failed: asymmetry {asymmetry:.3e} exceeds {tolerance:.3e}")]
    Asymmetric { asymmetry: f64, tolerance: f64 },

    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    /// True for errors caused by bad parameters rather than numerics.
    pub fn is_invalid_input(&self) -> bool {
        matches!(self, Error::InvalidInput(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
