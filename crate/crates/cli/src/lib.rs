//! Command implementations behind the `relsmooth` binary.

// Solver aborts carry the partial trace by value.
#![allow(clippy::result_large_err)]

pub mod commands;
pub mod io;
pub mod spec;
