//! Numerical laboratory for Rogers-Shephard type inequalities: convex
//! bodies, densities, Monte-Carlo and quadrature integration, quasi-concave
//! functions, and verifiers that compare both sides of each inequality.
//!
//! The geometric core is generic over the scalar type; integration and the
//! verifiers run in `f64`.

// `!(a < b)` is used on purpose so that NaN inputs are rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::needless_range_loop)]

pub mod bodies;
pub mod corekit;
pub mod densities;
pub mod error;
pub mod functional;
pub mod integrate;
pub mod scalar;
pub mod verify;

pub use error::{Error, Result};
pub use scalar::Real;

pub type Body = bodies::Body<f64>;
pub type Body32 = bodies::Body<f32>;
pub type LpProblem = corekit::LpProblem<f64>;
pub type LpProblem32 = corekit::LpProblem<f32>;
pub type QuadratureRule = corekit::QuadratureRule<f64>;

pub use densities::Density;
pub use functional::QcFunction;
pub use integrate::{Estimate, IntegrateConfig};
pub use verify::{IneqReport, Verdict};
