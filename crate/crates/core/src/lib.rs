//! Numerical verification of co-ordinated convexity, g-convex dominance and
//! the Hadamard and Fejér inequality chains on rectangles.
//!
//! Functions of two variables are written in a small expression language
//! ([`expr`]). Quantified statements are checked on deterministic sample
//! sets ([`domain`]), and integral quantities are computed with composite
//! tensor-product quadrature ([`quadrature`]). Results are structured values
//! that can be rendered as text or JSON ([`report`]).

pub mod cli;
pub mod convexity;
pub mod domain;
pub mod dominance;
pub mod error;
pub mod expr;
pub mod hmap;
pub mod inequalities;
pub mod quadrature;
pub mod report;
pub mod rng;
mod sweep;

pub use convexity::{CheckResult, Quantity, Tolerance, Verdict, Witness};
pub use domain::{Point, Rectangle, SamplePlan};
pub use dominance::DominancePair;
pub use error::{Error, Result};
pub use expr::{parse, FunctionExpr};
pub use quadrature::{QuadRule, QuadSpec};
