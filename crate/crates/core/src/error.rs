use alloc::string::String;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid Pauli symbol {0:?}")]
    InvalidSymbol(char),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("operator is not Hermitian (max deviation {0:.3e})")]
    NotHermitian(f64),
    #[error("state is not normalized (norm {0})")]
    NotNormalized(f64),
    #[error("expected {expected} parties, got {found}")]
    WrongPartyCount { expected: usize, found: usize },
    #[error("setting {0} out of range (allowed 0, 1, 2)")]
    InvalidSetting(u8),
    #[error("expression is not permutationally invariant: {0}")]
    NotPermutationInvariant(String),
    #[error("moment {0} is not representable in the moment matrix")]
    NonRepresentable(String),
    #[error("unknown sequence level {0:?}")]
    UnknownLevel(String),
    #[error("problem is infeasible")]
    Infeasible,
    #[error("problem is unbounded")]
    Unbounded,
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = core::result::Result<T, Error>;
