use thiserror::Error;

use crate::upoly::UPoly;

/// A zero divisor met while computing in `K[Y]/<w>`; `factor` is a
/// nontrivial monic divisor of `w`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZeroDivisor {
    pub factor: UPoly,
}

#[derive(Clone, Debug, Error)]
pub enum Error {
    #[error("{0} is not an odd prime below 2^63")]
    InvalidPrime(u64),
    #[error("inverse of zero")]
    ZeroInverse,
    #[error("zero divisor encountered (factor of degree {})", .0.factor.degree().unwrap_or(0))]
    ZeroDivisor(ZeroDivisor),
    #[error("moduli are not coprime")]
    NotCoprime,
    #[error("parametrizations use different linear forms")]
    LambdaMismatch,
    #[error("linear form does not separate the points")]
    NotSeparating,
    #[error("rational reconstruction failed")]
    NoSolution,
    #[error("point is not a root of the system")]
    NotARoot,
    #[error("no invertible Jacobian minor at a start point")]
    NoInvertibleMinor,
    #[error("lifted series does not cancel the homotopy")]
    ResidualNonzero,
    #[error("degenerate specialization at T=1")]
    Degenerate,
    #[error("singular linear system in a start branch")]
    RankDeficientBranch,
    #[error("start system has {found} points, expected {expected}")]
    CountMismatch { expected: u64, found: u64 },
    #[error("gave up after {attempts} attempts (last failure: {last})")]
    Exhausted { attempts: u32, last: String },
    #[error("problem too large: {0}")]
    TooLarge(String),
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{n} variables declared but q - p + s + 1 = {expected}")]
    DimensionMismatch { n: usize, expected: i64 },
    #[error("invalid degree profile: {0}")]
    InvalidProfile(String),
}

impl Error {
    /// Failures caused by unlucky random choices, cured by drawing again.
    pub fn is_retryable(&self) -> bool {
        matches!(
            self,
            Error::ZeroDivisor(_)
                | Error::NotCoprime
                | Error::LambdaMismatch
                | Error::NotSeparating
                | Error::NoSolution
                | Error::NoInvertibleMinor
                | Error::ResidualNonzero
                | Error::Degenerate
                | Error::RankDeficientBranch
                | Error::CountMismatch { .. }
                | Error::Exhausted { .. }
        )
    }
}

impl From<ZeroDivisor> for Error {
    fn from(z: ZeroDivisor) -> Error {
        Error::ZeroDivisor(z)
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Runs `attempt` with keys `key.child(0)`, `key.child(1)`, … until it
/// succeeds or fails with a non-retryable error. Returns the value and the
/// number of failed attempts.
pub fn retry<T>(
    budget: u32,
    key: &crate::field::RngKey,
    mut attempt: impl FnMut(crate::field::RngKey) -> Result<T>,
) -> Result<(T, u32)> {
    let mut last = String::from("no attempt made");
    for i in 0..budget {
        match attempt(key.child(u64::from(i))) {
            Ok(t) => return Ok((t, i)),
            Err(e) if e.is_retryable() => last = e.to_string(),
            Err(e) => return Err(e),
        }
    }
    Err(Error::Exhausted {
        attempts: budget,
        last,
    })
}
