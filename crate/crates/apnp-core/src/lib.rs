//! All-pairs non-decreasing paths (APNP).
//!
//! A walk is non-decreasing when every step's weight is at least the previous
//! step's. For each ordered pair `(i, j)` the goal is the minimum weight the
//! *final* edge of such a walk can have; minimizing the last edge greedily is
//! what lets a non-decreasing journey continue onward as cheaply as possible.
//! Walks must contain at least one edge, so the diagonal entry `(i, i)` exists
//! exactly when some non-decreasing closed walk returns to `i`.
//!
//! The crate ships a partition-based directed solver, a fingerprinted-string
//! undirected solver, a weight-tie rewrite so both can assume pairwise
//! distinct weights, and deliberately plain reference solvers to check them
//! against. Everything is deterministic: same input and seed, same output,
//! byte for byte.

#![cfg_attr(not(test), no_std)]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod balance;
pub mod bits;
pub mod boolmat;
pub mod bucket;
pub mod config;
pub mod dynstring;
pub mod error;
pub mod gen;
pub mod graph;
pub mod oracle;
pub mod partition;
pub mod reduce;
pub mod rng;
pub mod solver;
pub mod undirected;

pub use config::SolverConfig;
pub use error::{Error, Result};
pub use graph::{ApnpMatrix, Edge, Graph, RankedGraph};
