//! Double-barrier option pricing on a curvilinear heat strip.
//!
//! The pricing problem is reduced to the heat equation on a strip with
//! moving boundaries and rebates. Two semi-analytic solvers are provided,
//! one through the boundary gradients of the solution ([`git`]) and one
//! through double-layer heat potentials ([`hp`]), together with a
//! Crank-Nicolson finite-difference oracle ([`fd`]).

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop, clippy::too_many_arguments)]

pub mod error;
pub mod fd;
pub mod git;
pub mod greeks;
pub mod grid;
pub mod hp;
pub mod kernels;
mod march;
pub mod problem;
pub mod quad;

pub use error::{Error, Result};
pub use grid::{Spacing, TimeGrid};
pub use march::MarchDiagnostics;
