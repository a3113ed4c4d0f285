//! Simulation and analytic bounds for stationary Poisson cylinder processes.
//!
//! A `k`-cylinder in ℝᵈ is the Minkowski sum of a k-dimensional linear
//! subspace with a compact convex base in the orthogonal complement; `k = 0`
//! recovers the classical Boolean model. This crate samples the union set of
//! such a process restricted to a compact convex window, estimates its volume
//! and surface functionals by hit-or-miss Monte Carlo, and evaluates the
//! matching analytic machinery: mean-value formulas for all intrinsic
//! volumes, Chernoff-type concentration bounds for the volume and intrinsic
//! volumes, and their closed-form special cases.
//!
//! Modules:
//! - [`geometry`]: convex bodies, intrinsic volumes, projections, Minkowski
//!   sums, combinatorial constants.
//! - [`sampling`]: reproducible RNG streams, Haar rotations, Poisson counts,
//!   base-direction laws with exact moment oracles.
//! - [`process`]: window-restricted realizations and empirical estimators.
//! - [`bounds`]: tail-bound evaluation (numeric Chernoff optimisation plus
//!   every closed form).
//! - [`meanvalues`]: exact mean-value formulas in dual forms.

#![forbid(unsafe_code)]

pub mod bounds;
pub mod geometry;
pub mod meanvalues;
pub mod numeric;
pub mod process;
pub mod sampling;

pub use bounds::{BoundCurve, BoundParams, Tail};
pub use geometry::{ConvexBody, GeometryError, Rotation};
pub use meanvalues::MeanValueResult;
pub use process::{Cylinder, ProcessConfig, Realization, TailCurve};
pub use sampling::{BaseDirectionLaw, RadiusLaw, RngStream};
