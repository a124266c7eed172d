// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod codebook;
pub mod divergence;
pub mod error;
pub mod exponent;
pub mod hermitian;
pub mod info;
pub mod matrix;
pub mod random;
pub mod theta;
pub mod verify;

pub use error::{Error, Result};
pub use hermitian::{DensityOperator, HermitianMatrix, Spectrum};
pub use info::{CqSource, InfoResult, SolverConfig};
pub use matrix::CMatrix;
