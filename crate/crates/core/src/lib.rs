//! Simulation and verification library for quantum state reduction.
//!
//! * [`linalg`]: dense state vectors, operators, projective measurement.
//! * [`protocol`]: local measurement of the nonlocal observables `T_z` and
//!   `T²` of two isospin-1/2 particles through entangled three-level probes.
//! * [`dynamics`]: GRW localization hits and discrete CSL evolution.
//! * [`spacetime`]: hypersurface-indexed collapse in 1+1 Minkowski space,
//!   property attribution and counterfactual bookkeeping.
//! * [`relativistic`]: the `T²` protocol run surface by surface.
//! * [`trace`]: replayable run records.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dynamics;
pub mod error;
pub mod exec;
pub mod linalg;
pub mod protocol;
pub mod relativistic;
pub mod rng;
pub mod spacetime;
pub mod stats;
pub mod trace;

pub use error::{Error, Result};
