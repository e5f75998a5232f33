use thiserror::Error;

use num_complex::Complex64;

/// Errors raised anywhere in the numerical pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("pole of {function} at {at}")]
    Pole { function: &'static str, at: Complex64 },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("quadrature budget of {evaluations} evaluations exhausted (estimate {best}, error {abs_error:e})")]
    MaxEvaluations {
        best: Complex64,
        abs_error: f64,
        evaluations: usize,
    },
    #[error("non-finite value produced at {0}")]
    NonFinite(String),
    #[error("level {0} is not supported (squarefree levels only)")]
    UnsupportedLevel(u64),
    #[error("identity element has no trace classification")]
    IdentityInput,
    #[error("prime {0} is unsupported by the point-count oracle")]
    UnsupportedPrime(u64),
    #[error("q-expansion truncated at {n_max} terms is insufficient at height {height}")]
    TruncationInsufficient { height: f64, n_max: usize },
    #[error("s = {s} lies outside the convergence region ({requirement})")]
    ConvergenceRegion { s: Complex64, requirement: &'static str },
    #[error("certified tail {tail:e} exceeds tolerance {tolerance:e}")]
    TailTooLarge { tail: f64, tolerance: f64 },
    #[error("modular symbol {value:e} exceeds ten times its growth envelope {envelope:e} at c = {c}")]
    EnvelopeViolation { value: f64, envelope: f64, c: f64 },
    #[error("ill-conditioned extraction (condition number {0:e})")]
    IllConditioned(f64),
    #[error("continuation unavailable: {0}")]
    ContinuationUnavailable(String),
    #[error("validation failure: {0}")]
    ValidationFailure(String),
    #[error("s = {s} is within the guard radius of the pole {pole}")]
    PoleHit { s: Complex64, pole: Complex64 },
    #[error("precondition unverifiable: {0}")]
    PreconditionUnverifiable(String),
    #[error("unsupported cusp: {0}")]
    UnsupportedCusp(String),
    #[error("invalid newform data: {0}")]
    InvalidNewform(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub(crate) fn finite(z: Complex64, what: &str) -> Result<Complex64> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(z)
    } else {
        Err(Error::NonFinite(what.to_string()))
    }
}
