//! Simulation laboratory for T-crossings of nested planar random tessellations.
//!
//! An initial tessellation `X` (Poisson line or Poisson–Voronoi) is observed
//! in a convex window; every cell of `X` is subdivided by an independent copy
//! of a motion-invariant component tessellation `X0`. The functional of
//! interest is the number of points where component edges cross the cell
//! boundaries of `X` inside the window.
//!
//! * [`geom2d`]: convex planar geometry, generic over the scalar type.
//! * [`tessellate`]: Poisson line and Poisson–Voronoi generators.
//! * [`nesting`]: per-cell component tessellations and crossing counts.
//! * [`moments`]: closed-form intensities and asymptotic variances in any
//!   dimension, generic over the scalar type.
//! * [`montecarlo`]: replication engine, normality tests, rate fits and
//!   constant estimators.

pub mod error;
pub mod geom2d;
pub mod moments;
pub mod montecarlo;
pub mod nesting;
pub mod scalar;
pub mod tessellate;

pub use error::{Error, Result};
pub use scalar::Scalar;

/// Double precision aliases used throughout the simulation code.
pub type Point = geom2d::Point<f64>;
pub type Line = geom2d::Line<f64>;
pub type Segment = geom2d::Segment<f64>;
pub type ConvexPolygon = geom2d::ConvexPolygon<f64>;
pub type Window = geom2d::Window<f64>;
pub type MomentReport = moments::MomentReport<f64>;

/// Single precision geometry aliases.
pub type Point32 = geom2d::Point<f32>;
pub type Line32 = geom2d::Line<f32>;
pub type ConvexPolygon32 = geom2d::ConvexPolygon<f32>;
pub type MomentReport32 = moments::MomentReport<f32>;
