//! Unbounded best-first minimax with four orthogonal variant axes:
//! transposition tables, full vs. invariant-node backpropagation, exact vs.
//! heuristic terminal evaluation, and completion (resolution-aware values).
//!
//! The crate also carries the desk-scale game roster, a brute-force oracle
//! used as ground truth, and a tournament harness with stratified bootstrap
//! confidence intervals.

pub mod eval;
pub mod game;
pub mod harness;
pub mod oracle;
pub mod search;
pub mod transposition;
pub mod value;

pub use value::{completed_compare, CompletedValue, Resolution};
