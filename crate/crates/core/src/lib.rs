//! Bit-accurate models of plus-one adder cells and the hybrid
//! overestimating approximate adder HOAA(N, m).
//!
//! - [`cells`]: gate netlists, truth tables, gate/transistor cost, unit delay
//! - [`chains`]: ripple, hybrid, lower-part-OR and subtractor chains
//! - [`metrics`]: exhaustive and seeded Monte Carlo error reports
//! - [`apps`]: subtraction, round-to-even and CORDIC sigmoid/tanh kernels

pub mod apps;
pub mod cells;
pub mod chains;
pub mod error;
pub mod metrics;
pub mod reference;

pub use error::{Error, Result};
