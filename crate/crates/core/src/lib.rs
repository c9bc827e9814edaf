//! Exact solution representations for the time-fractional telegraph equation
//!
//! ```text
//! ∂^α u + b ∂^β u - u_xx + c u = f,    α = 2β ∈ (0, 2),
//! ```
//!
//! with Caputo derivatives in `y`: special functions, the fundamental
//! solution and its derivatives, image-series Green functions, solution
//! evaluators, and an independent finite-difference reference solver.

// Negated comparisons are used on purpose: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod exprparse;
pub mod green;
pub mod kernel;
pub mod oracle;
pub mod quad;
pub mod solver;
pub mod specfun;

pub use error::{Error, Result};
