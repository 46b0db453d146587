//! Box-constrained Neumann boundary control of semilinear elliptic equations
//! on corner-graded P1 finite element meshes.
//!
//! The crate provides the full pipeline: sector domains and graded
//! triangulations, P1 assembly and linear solves, semilinear state / adjoint
//! solvers with reduced derivatives, the piecewise-constant control space
//! with its projection and interpolation operators, an SQP optimizer with a
//! primal-dual active set inner solver, and a convergence-study harness that
//! measures experimental orders of convergence of the postprocessed control.
//!
//! See the `examples/` directory for runnable entry points per capability.

pub mod error;
pub mod geometry;
pub mod quadrature;
pub mod mesh;
pub mod fem;
pub mod control;
pub mod problem;
pub mod pde;
pub mod optimizer;
pub mod bench;

pub use error::{Error, Result};
