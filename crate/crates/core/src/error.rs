use thiserror::Error;

use crate::rational::Rational;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised by the library. Each variant maps onto one of three
/// families (input, refusal, internal) used by the command-line exit codes.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("germ mismatch: {0}")]
    GermMismatch(String),

    #[error("weight vector is zero")]
    ZeroWeight,

    #[error("the zero ideal has no finite order")]
    ZeroIdeal,

    #[error("weight {0} is not a point of the lattice N")]
    NotInLattice(String),

    #[error("weights {0} have a common factor; pass the primitive vector")]
    NotPrimitive(String),

    #[error("the second regular system has a singular Jacobian at the origin")]
    SingularJacobian,

    #[error("order exceeds bound {bound}")]
    OrderExceedsBound { bound: u64 },

    #[error("truncation schedule reached the hard cap {cap} without certifying")]
    NonTermination { cap: u64 },

    #[error("pair is not lc: direction {} has log discrepancy {value}", crate::valuation::fmt_weights(direction))]
    NotLc { direction: Vec<Rational>, value: Rational },

    #[error("uncertified: {0}")]
    Uncertified(String),

    #[error("weak transform needs a non-Cartier subtraction of {order} on chart {chart}; use the Q-transform mode")]
    NonIntegralTransform { chart: usize, order: Rational },

    #[error("crepancy hypothesis violated: {0}")]
    CrepancyViolated(String),

    #[error("target unreachable: {0}")]
    TargetUnreachable(String),

    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub fn invariant(msg: impl Into<String>) -> Self {
        Error::Invariant(msg.into())
    }

    /// True for errors where the engine declined to certify an answer rather
    /// than rejecting its input.
    pub fn is_refusal(&self) -> bool {
        matches!(
            self,
            Error::Uncertified(_)
                | Error::OrderExceedsBound { .. }
                | Error::NonTermination { .. }
                | Error::CrepancyViolated(_)
                | Error::NotLc { .. }
                | Error::TargetUnreachable(_)
        )
    }
}

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
