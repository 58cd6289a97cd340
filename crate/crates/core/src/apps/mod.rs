//! Application kernels that exercise the `+1` path: two's-complement
//! subtraction, round-to-even quantization, and the CORDIC activation.

pub mod cases;
pub mod cordic;
pub mod fixed;
pub mod rounding;

pub use crate::chains::{subtract, Subtraction};
pub use cases::{case_report, CaseParams, CaseStudy};
pub use cordic::{
    activation, cordic_sinh_cosh, evaluate_grid, nonrestoring_divide, uniform_grid, AfSelect,
    Activation, CordicConfig, GridPoint, SinhCosh, CONVERGENCE_BOUND,
};
pub use fixed::{Fixed, FixedPointFormat};
pub use rounding::{round_ties_even_reference, round_to_even};
