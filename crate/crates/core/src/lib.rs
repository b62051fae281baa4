// `!(x > 0.0)` is used on purpose so that NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod backward_solver;
pub mod cli;
pub mod error;
pub mod fde_core;
pub mod forward_solver;
pub mod fractional_ops;
pub mod special_functions;
pub mod spectral_basis;
pub mod verification;

mod differentiation;
mod toeplitz;

pub use error::{Error, Result};
