use std::fmt;

use num_bigint::BigInt;
use serde::Serialize;

/// Why a matrix fails the hyperbolicity hypotheses.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Rejection {
    /// `det A = 0`, so one eigenvalue vanishes.
    Singular,
    /// An eigenvalue has modulus exactly one.
    EigenvalueOnUnitCircle,
    /// No eigenvalue lies strictly inside the unit circle.
    NoContractingEigenvalue,
    /// No eigenvalue lies strictly outside the unit circle.
    NoExpandingEigenvalue,
    /// The 3x3 matrix is not of the block form `diag(m, B)` with `det B = 1`,
    /// or violates `m > 1`, `tr B > 2` or `m^2 > lambda`.
    Unsupported3d(String),
    /// Only 2x2 and 3x3 matrices are handled.
    UnsupportedDimension(usize),
}

impl fmt::Display for Rejection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rejection::Singular => write!(f, "singular matrix (zero eigenvalue)"),
            Rejection::EigenvalueOnUnitCircle => write!(f, "eigenvalue on unit circle"),
            Rejection::NoContractingEigenvalue => {
                write!(f, "no eigenvalue of modulus < 1 (|lambda1| >= 1)")
            }
            Rejection::NoExpandingEigenvalue => write!(f, "no eigenvalue of modulus > 1"),
            Rejection::Unsupported3d(why) => write!(f, "unsupported 3x3 matrix: {why}"),
            Rejection::UnsupportedDimension(d) => write!(f, "unsupported dimension {d}"),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("matrix rejected: {0}")]
    Rejected(Rejection),

    #[error("A^n - I is singular for n = {n}")]
    Singular { n: u32 },

    #[error("periodic point count {count} exceeds listing cap {cap}")]
    CapExceeded { count: BigInt, cap: u64 },

    #[error("brute-force oracle bound exceeded: |det(A^n - I)| = {count} > {bound}")]
    OracleTooLarge { count: BigInt, bound: u64 },

    #[error("geometry at odd n = {n} requested for a matrix with a negative eigenvalue")]
    OddPowerWithNegativeEigenvalue { n: u32 },

    #[error("input is rational")]
    RationalInput,

    #[error("domain error: {0}")]
    Domain(String),

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("parameters lie on a regime boundary: {0}")]
    Regime(String),

    #[error("insufficient samples: {0}")]
    InsufficientSamples(String),

    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("internal invariant violated: {0}")]
    Internal(String),
}

impl From<Rejection> for Error {
    fn from(r: Rejection) -> Self {
        Error::Rejected(r)
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
