//! Solvability of multiple interpolation by exponential series: the
//! limit directions of the exponents must meet the contact directions of
//! the domain at the limit point of the nodes.

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::exponents::{limit_directions, ExponentError, ExponentSequence, DEFAULT_CLUSTER_TOL};
use crate::geometry::{ConvexDomain, Direction, DirectionSet, GeometryError};
use crate::interpolation::NodeSet;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CriterionError {
    #[error("domain does not meet the real axis")]
    EmptyRealSection,
    #[error("node {0} lies outside the domain")]
    NodesOutsideDomain(f64),
    #[error("limit point is not on the boundary (distance {distance:e}, tolerance {tol:e})")]
    LimitPointNotOnBoundary { distance: f64, tol: f64 },
    #[error("inner domain is not contained in the outer one (direction {angle}: {inner} > {outer})")]
    NotNested { angle: f64, inner: f64, outer: f64 },
    #[error(transparent)]
    Geometry(GeometryError),
    #[error(transparent)]
    Exponents(#[from] ExponentError),
}

impl From<GeometryError> for CriterionError {
    fn from(e: GeometryError) -> Self {
        match e {
            GeometryError::PointNotOnBoundary { distance, tol } => {
                CriterionError::LimitPointNotOnBoundary { distance, tol }
            }
            other => CriterionError::Geometry(other),
        }
    }
}

/// How much the limit directions can be trusted.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Confidence {
    /// Taken from an explicit tail model.
    Exact,
    /// Estimated from a finite prefix.
    PrefixEstimated,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Decision {
    pub solvable: bool,
    /// A direction in `P ∩ T`: the midpoint of its widest arc.
    pub witness: Option<Direction>,
    /// Limit directions of the exponents.
    pub p: DirectionSet,
    /// Contact directions at the limit point.
    pub t: DirectionSet,
    pub confidence: Confidence,
}

fn check_inputs(domain: &ConvexDomain, nodes: &NodeSet) -> Result<(), CriterionError> {
    if domain.real_section().is_none() {
        return Err(CriterionError::EmptyRealSection);
    }
    if let Some(n) = nodes
        .nodes()
        .iter()
        .find(|n| !domain.contains(Complex64::new(n.mu, 0.0)))
    {
        return Err(CriterionError::NodesOutsideDomain(n.mu));
    }
    Ok(())
}

fn limit_point(nodes: &NodeSet) -> Complex64 {
    Complex64::new(nodes.limit(), 0.0)
}

/// Decides whether `P(Λ) ∩ T_D(μ*) ≠ ∅`, `μ*` the limit point of the nodes.
/// Arcs are compared as closed sets with endpoint tolerance `tol`, which is
/// also the boundary tolerance for the contact directions.
pub fn decide_solvability(
    domain: &ConvexDomain,
    seq: &ExponentSequence,
    nodes: &NodeSet,
    tol: f64,
) -> Result<Decision, CriterionError> {
    check_inputs(domain, nodes)?;
    let t = domain.contact_directions(limit_point(nodes), tol)?;
    let p = limit_directions(seq, None, DEFAULT_CLUSTER_TOL)?;
    let common = p.intersect(&t, tol);
    Ok(Decision {
        solvable: !common.is_empty(),
        witness: common.witness(),
        p,
        t,
        confidence: if seq.has_exact_tail() {
            Confidence::Exact
        } else {
            Confidence::PrefixEstimated
        },
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct Necessity {
    pub limit_point_in_hull: bool,
    pub hull: ConvexDomain,
}

/// Relative depth below which a point counts as lying on the hull boundary.
pub const HULL_BOUNDARY_TOL: f64 = 1e-9;

/// Builds the hull of `domain` over the limit directions and tests whether
/// the limit point of the nodes falls inside it: deeper than
/// [`HULL_BOUNDARY_TOL`]` · (1 + |μ*| + magnitude)`, so that rounding in the
/// support values cannot move a boundary point inside.
pub fn necessity_check(
    domain: &ConvexDomain,
    seq: &ExponentSequence,
    nodes: &NodeSet,
    grid: usize,
) -> Result<Necessity, CriterionError> {
    check_inputs(domain, nodes)?;
    let p = limit_directions(seq, None, DEFAULT_CLUSTER_TOL)?;
    let hull = domain.s_convex_hull(&p, grid)?;
    let p0 = limit_point(nodes);
    let depth = HULL_BOUNDARY_TOL * (1.0 + p0.norm() + domain.magnitude());
    Ok(Necessity {
        limit_point_in_hull: hull.slack(p0) > depth,
        hull,
    })
}

const NESTING_DIRECTIONS: usize = 256;

/// Checks that solvability for `outer` carries over to `inner ⊆ outer`.
/// Nesting is verified on the support values of a direction grid first.
pub fn domain_monotonicity_check(
    inner: &ConvexDomain,
    outer: &ConvexDomain,
    seq: &ExponentSequence,
    nodes: &NodeSet,
    tol: f64,
) -> Result<bool, CriterionError> {
    let scale = 1.0 + inner.magnitude() + outer.magnitude();
    for k in 0..NESTING_DIRECTIONS {
        let angle = std::f64::consts::TAU * k as f64 / NESTING_DIRECTIONS as f64;
        let s = Direction::new(angle);
        let (di, do_) = (inner.support_value(s), outer.support_value(s));
        if di.to_f64() > do_.to_f64() + tol * scale {
            return Err(CriterionError::NotNested {
                angle: s.angle(),
                inner: di.to_f64(),
                outer: do_.to_f64(),
            });
        }
    }
    if !decide_solvability(outer, seq, nodes, tol)?.solvable {
        return Ok(true);
    }
    Ok(decide_solvability(inner, seq, nodes, tol)?.solvable)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    const TOL: f64 = 1e-9;

    fn nodes() -> NodeSet {
        let mus: Vec<f64> = (2..=12).map(|k| -1.0 / k as f64).collect();
        NodeSet::simple(&mus, 0.0).unwrap()
    }

    fn left() -> ConvexDomain {
        ConvexDomain::half_plane(0.0, 0.0).unwrap()
    }

    fn square() -> ConvexDomain {
        ConvexDomain::rectangle(-1.0, 0.0, -1.0, 0.0).unwrap()
    }

    fn ray(beta: f64) -> ExponentSequence {
        ExponentSequence::ray(beta, 2.0, 2.0).unwrap()
    }

    #[test]
    fn decision_examples() {
        let d = decide_solvability(&left(), &ray(0.0), &nodes(), TOL).unwrap();
        assert!(d.solvable);
        assert_eq!(d.witness.unwrap().angle(), 0.0);
        assert_eq!(d.confidence, Confidence::Exact);

        let d = decide_solvability(&left(), &ray(FRAC_PI_2), &nodes(), TOL).unwrap();
        assert!(!d.solvable);
        assert!(d.witness.is_none());

        let d = decide_solvability(&square(), &ray(-FRAC_PI_4), &nodes(), TOL).unwrap();
        assert!(d.solvable);
        assert_eq!(d.witness.unwrap().angle(), -FRAC_PI_4);
    }

    #[test]
    fn input_errors() {
        let inside = NodeSet::simple(&[-2.0, -1.0], -0.5).unwrap();
        assert!(matches!(
            decide_solvability(&left(), &ray(0.0), &inside, TOL),
            Err(CriterionError::LimitPointNotOnBoundary { .. })
        ));
        let outside = NodeSet::simple(&[-1.0, 0.5], 1.0).unwrap();
        assert_eq!(
            decide_solvability(&left(), &ray(0.0), &outside, TOL),
            Err(CriterionError::NodesOutsideDomain(0.5))
        );
        let above = ConvexDomain::half_plane(-FRAC_PI_2, -1.0).unwrap();
        assert_eq!(
            decide_solvability(&above, &ray(0.0), &nodes(), TOL),
            Err(CriterionError::EmptyRealSection)
        );
    }

    #[test]
    fn necessity_examples() {
        let n = necessity_check(&left(), &ray(FRAC_PI_2), &nodes(), 64).unwrap();
        assert!(n.limit_point_in_hull);
        assert!(n.hull.is_whole_plane());

        let n = necessity_check(&left(), &ray(0.0), &nodes(), 64).unwrap();
        assert!(!n.limit_point_in_hull);
        assert!(n.hull.contains(Complex64::new(-1e-6, 1e6)));
        assert!(!n.hull.contains(Complex64::new(1e-6, 0.0)));

        let n = necessity_check(&square(), &ray(-FRAC_PI_4), &nodes(), 64).unwrap();
        assert!(!n.limit_point_in_hull);
    }

    #[test]
    fn monotonicity_examples() {
        let disc = ConvexDomain::disc(Complex64::new(-1.0, 0.0), 1.0).unwrap();
        assert!(domain_monotonicity_check(&disc, &left(), &ray(0.0), &nodes(), TOL).unwrap());
        assert!(domain_monotonicity_check(&square(), &left(), &ray(0.0), &nodes(), TOL).unwrap());
        assert!(domain_monotonicity_check(&disc, &left(), &ray(FRAC_PI_2), &nodes(), TOL).unwrap());
        assert!(matches!(
            domain_monotonicity_check(&left(), &disc, &ray(0.0), &nodes(), TOL),
            Err(CriterionError::NotNested { .. })
        ));
    }

    #[test]
    fn prefix_only_sequences_are_flagged() {
        let values: Vec<Complex64> = (1..=40).map(|n| Complex64::from_polar(2f64.powi(n), 0.0)).collect();
        let seq = ExponentSequence::from_values(values).unwrap();
        let d = decide_solvability(&left(), &seq, &nodes(), TOL).unwrap();
        assert!(d.solvable);
        assert_eq!(d.confidence, Confidence::PrefixEstimated);
        let mirrored = ExponentSequence::ray(PI, 2.0, 2.0).unwrap();
        assert!(!decide_solvability(&left(), &mirrored, &nodes(), TOL).unwrap().solvable);
    }
}
