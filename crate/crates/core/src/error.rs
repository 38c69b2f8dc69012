use alloc::string::String;
use alloc::vec::Vec;

use crate::numerics::lp::LpStatus;

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// A complex eigenvalue as `(re, im)`.
pub type EigenPair = ((f64, f64), (f64, f64));

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[non_exhaustive]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The augmented Lyapunov equation has no solution. The listed eigenvalue
    /// pairs of the system matrix sum to (numerically) zero.
    #[error("observability gramian undefined (residual {residual:.3e}); eigenvalue pairs summing to zero: {pairs:?}")]
    GramianUndefined { pairs: Vec<EigenPair>, residual: f64 },

    #[error("column variant enumeration over n = {n} nodes exceeds the guard of {guard}")]
    EnumerationTooLarge { n: usize, guard: usize },

    #[error("linear program for column {column} ended with status {status:?}")]
    Solver { column: usize, status: LpStatus },

    /// The fixed Gramian admits no perturbation satisfying the Lyapunov
    /// equation.
    #[error("fixed gramian is not feasible: affine constraint residual {residual:.3e}")]
    InfeasibleGramian { residual: f64 },

    #[error("structural network count overflows u128")]
    CountOverflow,
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    /// Short stable identifier, used by front ends for machine-readable error
    /// reporting.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidInput(_) => "invalid-input",
            Error::GramianUndefined { .. } => "gramian-undefined",
            Error::EnumerationTooLarge { .. } => "enumeration-too-large",
            Error::Solver { .. } => "solver",
            Error::InfeasibleGramian { .. } => "infeasible-gramian",
            Error::CountOverflow => "count-overflow",
        }
    }
}
