//! Error type shared by every module of the crate.
//!
//! Errors fall into two families that callers usually want to treat
//! differently: *contract* errors (the inputs violate a documented
//! precondition) and *non-convergence reports* (an iterative procedure ran
//! out of budget before certifying its answer).  [`Error::is_non_convergence`]
//! distinguishes them.

use thiserror::Error;

/// Result alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong in the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Two objects that must live on the same site space do not.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// A documented precondition was violated (support condition,
    /// value range, missing witness, ...).
    #[error("contract violation: {0}")]
    Contract(String),

    /// A site identifier was not found in the site space.
    #[error("unknown site `{0}`")]
    UnknownSite(String),

    /// Input could not be parsed.
    #[error("parse error: {0}")]
    Parse(String),

    /// Power iteration did not reach the requested accuracy.
    #[error(
        "spectral radius iteration limit reached after {iterations} iterations; \
         radius lies in [{lower}, {upper}]"
    )]
    IterationLimit {
        /// Iterations performed.
        iterations: usize,
        /// Best certified lower bound.
        lower: f64,
        /// Best certified upper bound.
        upper: f64,
    },

    /// A truncated series could not be certified within the term budget.
    #[error("non-contraction: {terms} terms used, certified tail bound {tail_bound:e} exceeds tolerance {tol:e}")]
    NonContraction {
        /// Number of series terms that were summed.
        terms: usize,
        /// Best available bound on the neglected tail.
        tail_bound: f64,
        /// Requested tolerance.
        tol: f64,
    },

    /// A planner or schedule generator cannot be applied to this instance.
    #[error("not applicable: {0}")]
    NotApplicable(String),

    /// A finite check could not decide the question within its cap.
    #[error("inconclusive: {0}")]
    Inconclusive(String),

    /// The requested combination has no implemented closed form.
    #[error("not implemented: {0}")]
    NotImplemented(String),
}

impl Error {
    /// `true` for errors that report a failure to converge rather than a
    /// broken precondition.
    pub fn is_non_convergence(&self) -> bool {
        matches!(
            self,
            Error::IterationLimit { .. } | Error::NonContraction { .. } | Error::NotApplicable(_)
        )
    }

    pub(crate) fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }

    pub(crate) fn dimension(msg: impl Into<String>) -> Self {
        Error::Dimension(msg.into())
    }
}
