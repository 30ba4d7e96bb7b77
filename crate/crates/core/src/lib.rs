//! Multiple interpolation by exponential series: the solvability criterion
//! and the numerical objects around it.
//!
//! - [`geometry`]: convex domains, support values, contact directions, S-convex hulls.
//! - [`exponents`]: exponent sequences, their limit directions, thinning.
//! - [`product`]: canonical products over separated exponents, condensation index.
//! - [`exppoly`]: exponential polynomials, sector lower bounds, zero-free radii.
//! - [`interpolation`]: finite-section Hermite interpolation, absolute convergence.
//! - [`criterion`]: the solvability decision and its companion checks.
//! - [`schema`]: JSON shapes of domains, exponents, nodes and data.
//! - [`cli`]: the `expseries` command-line front end.

pub mod geometry;
pub mod exponents;
pub mod product;
pub mod exppoly;
pub mod interpolation;
pub mod criterion;
pub mod schema;
pub mod cli;
