//! Frank-Wolfe methods for generalized self-concordant objectives.
//!
//! The crate is organised bottom-up: [`gsc`] holds the function class and
//! its kernels, [`stepsize`] the scalar step problem, [`oracles`] the
//! feasible sets, [`solvers`] the iterations and [`problems`] the
//! benchmark objectives with their data generators.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod gsc;
pub mod linalg;
pub mod oracles;
pub mod problems;
pub mod solvers;
pub mod stepsize;

pub use error::{Error, Result};
pub use gsc::{GscSpec, LocalGeometry, Objective, Order};
pub use oracles::{FeasibleSet, Vertex};
pub use stepsize::{PsiParams, StepDecision};
