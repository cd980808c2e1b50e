use thiserror::Error;

use crate::fock::Mode;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid truncation: {0}")]
    InvalidTruncation(String),

    #[error("mode {0} appears in both operands")]
    ModeCollision(Mode),

    #[error("mode {0} is not part of the state")]
    MissingMode(Mode),

    #[error("photon number {n} exceeds cutoff {n_max} of mode {mode}")]
    OutOfRange { mode: Mode, n: usize, n_max: usize },

    #[error("probability mass {mass:.3e} at the cutoff of mode {mode} exceeds tolerance {tolerance:.1e}")]
    TailMass { mode: Mode, mass: f64, tolerance: f64 },

    #[error("{operation} lost {lost:.3e} of probability mass past the cutoff (tolerance {tolerance:.1e})")]
    TruncationOverflow {
        operation: &'static str,
        lost: f64,
        tolerance: f64,
    },

    #[error("state has zero norm")]
    ZeroNorm,

    #[error("amplitude count {got} does not match the grid size {expected}")]
    ShapeMismatch { expected: usize, got: usize },

    #[error("qubit bases differ: {0:?} vs {1:?}")]
    BasisMismatch(crate::fock::LogicalBasis, crate::fock::LogicalBasis),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("amplitude-distorting factor is singular (zero matrix element in the denominator)")]
    SingularFactor,

    #[error("numerical search failed: {0}")]
    Search(String),
}

pub type Result<T> = std::result::Result<T, Error>;
