use alloc::boxed::Box;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension must be at least 1")]
    InvalidDimension,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("coefficient vector must be non-empty and not all-zero")]
    InvalidCoefficient,
    #[error("channel vector is all-zero")]
    DegenerateChannel,
    #[error("non-finite value in channel vector")]
    NonFinite,
    #[error("power must be positive and finite, got {0}")]
    InvalidPower(f64),
    #[error("argument out of domain: {0}")]
    Domain(&'static str),
    #[error("invariant violated: {0}")]
    InvariantViolation(&'static str),
    #[error("enumeration budget of {budget} nodes exceeded")]
    BudgetExceeded { budget: u64 },
    #[error("continued fraction did not converge in {iterations} iterations")]
    Convergence { iterations: usize },
    #[error("invalid configuration: {0}")]
    InvalidConfig(&'static str),
    #[error("trial {index}: {source}")]
    Trial { index: u64, source: Box<Error> },
}

impl Error {
    pub(crate) fn in_trial(self, index: u64) -> Self {
        Error::Trial {
            index,
            source: Box::new(self),
        }
    }

    /// The innermost error, with trial context stripped.
    pub fn root(&self) -> &Error {
        match self {
            Error::Trial { source, .. } => source.root(),
            other => other,
        }
    }
}
