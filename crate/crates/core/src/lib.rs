//! Experiment library for data-driven surrogates of a 1D Poisson problem.
//!
//! The pipeline runs classical solves ([`pde`]), fits lines and networks to
//! data ([`regress`], [`ann`]), trains parametric surrogates over the
//! problem inputs ([`surrogate`]) and accounts for what the surrogate really
//! costs end to end ([`costs`]).

// `!(x > 0.0)` is used on purpose so NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod ann;
pub mod costs;
pub mod error;
pub mod linalg;
pub mod pde;
pub mod regress;
pub mod rng;
pub mod surrogate;

pub use error::{Error, Result};
