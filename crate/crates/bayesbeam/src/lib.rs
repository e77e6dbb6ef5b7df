//! Bayesian model updating for a clamped-free beam.
//!
//! The crate is split along the pipeline it implements:
//!
//! - [`fem`] builds mass/stiffness matrices for an Euler-Bernoulli cantilever
//!   and solves the generalized eigenproblem for natural frequencies and
//!   mode shapes, with Guyan reduction when measured coordinates are fewer
//!   than model coordinates.
//! - [`posterior`] turns a beam model, a set of updating parameters and
//!   measured natural frequencies into a log-posterior density, the
//!   associated potential energy and its finite-difference gradient.
//! - [`samplers`] draws Markov chains from any such density with
//!   Metropolis-Hastings, slice sampling or Hybrid Monte Carlo, and provides
//!   chain estimates and diagnostics.
//!
//! Everything here is pure computation over `f64`; persistence and the
//! command line live in the companion `bayesbeam-cli` crate. The crate is
//! `no_std` (with `alloc`), so it can be embedded anywhere a heap exists.

#![no_std]
#![warn(missing_docs)]

extern crate alloc;

#[cfg(test)]
extern crate std;

mod error;
mod num;

pub mod fem;
pub mod posterior;
pub mod samplers;

pub use error::Error;

/// Convenience alias used throughout the crate.
pub type Result<T> = core::result::Result<T, Error>;
