//! Planar convex geometry: directions on the unit circle, convex domains as
//! intersections of half-planes and discs, support values, contact
//! directions at boundary points, and S-convex hulls.

mod direction;
mod domain;
mod extended;

pub use direction::{angular_distance, ccw_offset, normalize_angle, Arc, Direction, DirectionSet};
pub use domain::{ConvexDomain, Disc, HalfPlane};
pub use extended::Extended;

use num_complex::Complex64;
use thiserror::Error;

/// Sampling density per arc used by [`ConvexDomain::s_convex_hull`] when the
/// caller has no preference. One more than a power of two, so that doubling
/// the number of intervals nests the sampled directions.
pub const DEFAULT_HULL_GRID: usize = 257;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("invalid domain: {0}")]
    InvalidDomain(String),
    #[error("point is not on the boundary (distance {distance:e}, tolerance {tol:e})")]
    PointNotOnBoundary { distance: f64, tol: f64 },
    #[error("direction set is empty")]
    EmptyDirectionSet,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

/// Free-function form of [`ConvexDomain::support_value`].
pub fn support_value(domain: &ConvexDomain, s: Direction) -> Extended {
    domain.support_value(s)
}

/// Free-function form of [`ConvexDomain::contact_directions`].
pub fn contact_directions(
    domain: &ConvexDomain,
    p: Complex64,
    tol: f64,
) -> Result<DirectionSet, GeometryError> {
    domain.contact_directions(p, tol)
}

/// Free-function form of [`ConvexDomain::s_convex_hull`].
pub fn s_convex_hull(
    domain: &ConvexDomain,
    directions: &DirectionSet,
    grid: usize,
) -> Result<ConvexDomain, GeometryError> {
    domain.s_convex_hull(directions, grid)
}

pub fn contains(domain: &ConvexDomain, z: Complex64) -> bool {
    domain.contains(z)
}
