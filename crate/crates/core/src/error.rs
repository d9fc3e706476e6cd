use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("quad relation violated: relative residual {residual:e} exceeds tolerance {tol:e}")]
    InvalidQuad { residual: f64, tol: f64 },

    #[error("non-finite value in input")]
    NonFinite,

    #[error("trace 0 has no one-sided length (parabolic or degenerate class)")]
    DegenerateTrace,

    #[error("two-sided trace {0} is real and lies in [-2, 2] (elliptic or parabolic class)")]
    NonHyperbolicTrace(f64),

    #[error("argument {0} lies within tolerance of the branch cut [0, 4]")]
    BranchCut(Complex64),

    #[error("zero denominator in {0}")]
    ZeroDenominator(&'static str),

    #[error("exploration budget exhausted after {limit} cells")]
    BudgetExceeded { limit: usize },

    #[error("no sink reached within {0} flips")]
    MaxStepsExceeded(usize),

    #[error("vertex has four strictly outgoing edges; input is numerically invalid")]
    SourceVertex,

    #[error("seed pair violates the recursion relation (residual {0:e})")]
    InvalidSeed(f64),

    #[error("Markoff-Hurwitz relation violated (relative residual {0:e})")]
    InvalidHurwitz(f64),

    #[error("BQ condition violated: face product {0} lies in [0, 4]")]
    BqViolation(Complex64),

    #[error("subtree is not connected: {0}")]
    DisconnectedTree(String),

    #[error("reduced quad {0} is not in the fundamental table")]
    NotFundamental(String),

    #[error("domain violation: {0}")]
    Domain(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// True for failures that mean "ran out of budget" rather than "bad input".
    pub fn is_budget(&self) -> bool {
        matches!(self, Error::BudgetExceeded { .. } | Error::MaxStepsExceeded(_))
    }
}
