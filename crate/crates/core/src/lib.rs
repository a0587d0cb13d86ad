//! Simulation laboratory for steady-state evolutionary algorithms on Jump-type
//! benchmarks, with exact bookkeeping of pairwise population diversity.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod algorithms;
pub mod bitpop;
pub mod error;
pub mod experiments;
pub mod fitness;
pub mod rng;
pub mod theory;
pub mod variation;

pub use error::{Error, Result};
