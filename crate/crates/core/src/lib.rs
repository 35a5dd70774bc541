//! Relatively smooth convex optimization: reference-function oracles with
//! solvable Bregman subproblems, primal gradient and dual averaging schemes,
//! built-in objectives, and numerical certificates of the smoothness constants.
//!
//! Every numeric type is generic over [`scalar::Scalar`] (`f32` or `f64`);
//! the aliases below fix the scalar to `f64`.

// `!(x > 0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// Solver aborts carry the partial trace by value.
#![allow(clippy::result_large_err)]
// Dense linear algebra reads more clearly with explicit indices.
#![allow(clippy::needless_range_loop)]

pub mod bregman;
pub mod calculus;
pub mod certify;
pub mod domain;
pub mod error;
pub mod linalg;
pub mod objectives;
pub mod oracle;
pub mod refs;
pub mod rng;
pub mod rootfind;
pub mod scalar;
pub mod solvers;
pub mod trace;

#[cfg(test)]
mod testutil;

pub use error::{Error, Result};
pub use oracle::{Objective, Reference};
pub use scalar::Scalar;

pub type Matrix = linalg::Matrix<f64>;
pub type Domain = domain::Domain<f64>;
pub type RelSmoothPair = oracle::RelSmoothPair<f64>;
pub type Subsolution = oracle::Subsolution<f64>;
pub type IterateTrace = trace::IterateTrace<f64>;
pub type TraceRecord = trace::TraceRecord<f64>;
pub type SolverConfig = solvers::SolverConfig<f64>;
pub type SolverAbort = solvers::SolverAbort<f64>;
pub type BoundQuery = certify::BoundQuery<f64>;
pub type DynObjective = dyn oracle::Objective<f64>;
pub type DynReference = dyn oracle::Reference<f64>;
