//! Inner and outer capacity-region bounds for the symmetric Gaussian causal
//! cognitive interference channel, with the polytope machinery needed to
//! compare them.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod certify;
pub mod channel;
pub mod error;
pub mod gaussian;
pub mod inner;
pub mod outer;
pub mod polytope;

pub use error::{Error, Result};
