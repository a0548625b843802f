use thiserror::Error;

use crate::channel::Regime;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("S must exceed 1 in linear scale (got {0})")]
    SnrTooSmall(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parameters (S={s}, I={i}, C={c}) are outside the validity set of regime {regime:?}: {reason}")]
    RegimeMismatch {
        regime: Regime,
        s: f64,
        i: f64,
        c: f64,
        reason: &'static str,
    },

    #[error("covariance matrix is not positive semi-definite (min eigenvalue {0:e})")]
    NotPsd(f64),

    #[error("unknown variable label `{0}`")]
    UnknownLabel(String),

    #[error("duplicate variable label `{0}`")]
    DuplicateLabel(String),

    #[error("singular covariance block: {0}")]
    Singular(String),

    #[error("region is unbounded")]
    Unbounded,

    #[error("region is empty")]
    Empty,

    #[error("linear system is infeasible")]
    Infeasible,

    #[error("dimension {0} exceeds the vertex-enumeration limit of {1}")]
    DimensionTooLarge(usize, usize),

    #[error("invalid power split: {0}")]
    InvalidSplit(String),

    #[error("integer overflow while combining rows")]
    Overflow,
}

pub type Result<T> = std::result::Result<T, Error>;
