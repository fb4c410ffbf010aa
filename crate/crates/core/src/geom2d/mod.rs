//! Planar convex geometry: lines, segments, convex polygons and windows.
//!
//! All predicates take an absolute tolerance `eps`. Events of interest in
//! the simulations are almost surely in general position, so `eps` only
//! absorbs floating-point noise; [`default_eps`] scales it with the size
//! of the window.

mod line;
mod point;
mod polygon;
mod window;

pub use line::{Line, Segment};
pub use point::Point;
pub use polygon::{
    boundary_crossings, clip_to_window, metrics, segment_crossings, split_by_line, ConvexPolygon,
    PolygonMetrics,
};
pub use window::Window;

pub(crate) use polygon::{bbox_of, clip_tagged, inward_halfplane};

use crate::scalar::Scalar;

/// Relative tolerance applied to the circumscribed radius of a window.
pub const EPS_SCALE: f64 = 1e-9;

/// `1e-9` times the given circumscribed radius (at least `1e-9`).
pub fn default_eps<T: Scalar>(circumradius: T) -> T {
    T::lit(EPS_SCALE) * circumradius.max(T::one())
}
