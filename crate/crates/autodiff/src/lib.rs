//! Reverse-mode automatic differentiation over dense `f64` tensors.
//!
//! The crate provides exactly what a small recurrent model and a
//! pulse-shaping optimizer need and nothing more:
//!
//! * [`Tape`] / [`Var`] — a record-replay graph of dense-matrix primitives
//!   (GEMM, affine rows, elementwise maps, reductions, column slicing and
//!   concatenation) differentiated in a single reverse sweep;
//! * [`grad_check`] — worst-case relative error of reverse-mode gradients
//!   against central finite differences, the arbiter for every composite
//!   expression used downstream;
//! * [`Adam`] — the shared first-order optimizer.
//!
//! Everything is 64-bit. A tape is single-threaded and lives for one
//! forward/backward pass; independent tapes may run concurrently and
//! gradient accumulation across tapes is the caller's explicit reduction.

mod adam;
mod error;
mod gradcheck;
mod tape;

pub use adam::Adam;
pub use error::AutodiffError;
pub use gradcheck::{grad_check, grad_check_params, grad_check_params_sampled};
pub use tape::{Tape, Var};
