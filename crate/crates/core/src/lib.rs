//! Optimal encoding of a spatial direction into `N` spin-1/2 particles and its
//! optimal decoding measurement.
//!
//! The maximal average fidelity is computed three independent ways:
//!
//! - as the top eigenvalue of a real symmetric tridiagonal matrix ([`fidelity`]),
//! - as the largest zero of a Jacobi polynomial ([`jacobi`]),
//! - by integrating or sampling explicit measurements ([`povm`], [`montecarlo`]).
//!
//! [`su2`] holds the group-theoretic substrate and [`cli`] the command surface
//! used by the `spindir` binary.

// `!(x > y)` is used on purpose so that NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod fidelity;
pub mod jacobi;
pub mod montecarlo;
pub mod povm;
pub mod su2;
pub mod verify;

pub use error::{Error, Result};
pub use su2::{Direction, HalfInt};
