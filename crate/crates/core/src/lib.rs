//! Exact convergence radii of algebraic power series.
//!
//! Given `P(X, T)` over Q and a simple root `t0` of `P(0, T)`, the branch
//! `f` with `f(0) = t0` and `P(X, f(X)) = 0` has a convergence radius that is
//! either infinite or a positive real algebraic number. [`radius::exact_radius`]
//! computes it exactly and cross-checks it against coefficient asymptotics.

pub mod branch;
pub mod cli;
pub mod continuation;
pub mod error;
pub mod estimate;
pub mod exactpoly;
pub mod radius;
pub mod realalg;
pub mod reinhardt;
pub mod singularities;

mod numeric;

pub use error::{Error, Result};
