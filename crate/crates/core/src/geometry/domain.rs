//! Convex domains built from half-planes and discs, and their support values.

use num_complex::Complex64;
use rayon::prelude::*;

use super::direction::{Arc, Direction, DirectionSet};
use super::extended::Extended;
use super::GeometryError;

const GOLDEN: f64 = 0.618_033_988_749_894_9;

/// Constraints with `|Im(u·s̄)|` below this are treated as parallel to the
/// probing line.
const PARALLEL_EPS: f64 = 1e-15;

/// `{z : Re(s·z) < bound}`; `bound = +∞` is the whole plane.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HalfPlane {
    pub direction: Direction,
    pub bound: Extended,
}

impl HalfPlane {
    pub fn new(direction: Direction, bound: impl Into<Extended>) -> Self {
        Self {
            direction,
            bound: bound.into(),
        }
    }

    /// Half-plane with the given outward normal `n` (as a complex number) and
    /// boundary line `{z : ⟨n, z⟩ = offset·|n|}`.
    pub fn from_outward_normal(normal: Complex64, offset: f64) -> Option<Self> {
        let dir = Direction::of(normal.conj())?;
        Some(Self::new(dir, offset))
    }

    pub fn contains(&self, z: Complex64) -> bool {
        match self.bound {
            Extended::PosInf => true,
            Extended::Finite(b) => (self.direction.unit() * z).re < b,
        }
    }

    /// Support value of the half-plane alone.
    pub fn support(&self, s: Direction) -> Extended {
        match self.bound {
            Extended::Finite(b) if s == self.direction => Extended::Finite(b),
            _ => Extended::PosInf,
        }
    }
}

/// Open disc `{z : |z − center| < radius}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Disc {
    pub center: Complex64,
    pub radius: f64,
}

impl Disc {
    pub fn new(center: Complex64, radius: f64) -> Self {
        Self { center, radius }
    }

    pub fn contains(&self, z: Complex64) -> bool {
        (z - self.center).norm() < self.radius
    }

    pub fn support(&self, s: Direction) -> Extended {
        Extended::Finite((s.unit() * self.center).re + self.radius)
    }
}

/// A nonempty open convex region: the intersection of finitely many
/// half-planes and discs. Immutable once built.
#[derive(Clone, Debug)]
pub struct ConvexDomain {
    halfplanes: Vec<HalfPlane>,
    discs: Vec<Disc>,
    interior: Complex64,
}

impl PartialEq for ConvexDomain {
    fn eq(&self, other: &Self) -> bool {
        self.halfplanes == other.halfplanes && self.discs == other.discs
    }
}

impl ConvexDomain {
    /// Validates the constituents and locates an interior point.
    ///
    /// Fails with `InvalidDomain` when a constituent is malformed or when the
    /// intersection has empty interior.
    pub fn new(halfplanes: Vec<HalfPlane>, discs: Vec<Disc>) -> Result<Self, GeometryError> {
        for h in &halfplanes {
            if !h.direction.angle().is_finite() {
                return Err(GeometryError::InvalidDomain(
                    "half-plane angle must be finite".into(),
                ));
            }
        }
        for d in &discs {
            if !(d.center.re.is_finite() && d.center.im.is_finite()) {
                return Err(GeometryError::InvalidDomain(
                    "disc center must be finite".into(),
                ));
            }
            if !(d.radius.is_finite() && d.radius > 0.0) {
                return Err(GeometryError::InvalidDomain(format!(
                    "disc radius must be positive and finite, got {}",
                    d.radius
                )));
            }
        }
        let mut domain = Self {
            halfplanes,
            discs,
            interior: Complex64::new(0.0, 0.0),
        };
        let (point, slack) = domain.deepest_point();
        let floor = 1e-12 * (1.0 + domain.magnitude());
        if !(slack > floor) || !domain.contains(point) {
            return Err(GeometryError::InvalidDomain(format!(
                "intersection has empty interior (best slack {slack:e})"
            )));
        }
        domain.interior = point;
        Ok(domain)
    }

    /// The whole complex plane.
    pub fn whole_plane() -> Self {
        Self {
            halfplanes: Vec::new(),
            discs: Vec::new(),
            interior: Complex64::new(0.0, 0.0),
        }
    }

    /// `{z : Re(e^{i·angle}·z) < bound}`.
    pub fn half_plane(angle: f64, bound: f64) -> Result<Self, GeometryError> {
        Self::new(vec![HalfPlane::new(Direction::new(angle), bound)], Vec::new())
    }

    pub fn disc(center: Complex64, radius: f64) -> Result<Self, GeometryError> {
        Self::new(Vec::new(), vec![Disc::new(center, radius)])
    }

    /// Open axis-parallel rectangle `(x0, x1) × (y0, y1)` as four half-planes.
    pub fn rectangle(x0: f64, x1: f64, y0: f64, y1: f64) -> Result<Self, GeometryError> {
        use std::f64::consts::FRAC_PI_2;
        Self::new(
            vec![
                // Re z < x1
                HalfPlane::new(Direction::new(0.0), x1),
                // -Re z < -x0
                HalfPlane::new(Direction::new(std::f64::consts::PI), -x0),
                // Re(-i z) = Im z < y1
                HalfPlane::new(Direction::new(-FRAC_PI_2), y1),
                // Re(i z) = -Im z < -y0
                HalfPlane::new(Direction::new(FRAC_PI_2), -y0),
            ],
            Vec::new(),
        )
    }

    /// Interior of a convex polygon given by its vertices in counterclockwise
    /// order.
    pub fn polygon(vertices: &[Complex64]) -> Result<Self, GeometryError> {
        if vertices.len() < 3 {
            return Err(GeometryError::InvalidDomain(
                "polygon needs at least three vertices".into(),
            ));
        }
        let mut halfplanes = Vec::with_capacity(vertices.len());
        for (i, &a) in vertices.iter().enumerate() {
            let b = vertices[(i + 1) % vertices.len()];
            let edge = b - a;
            // Outward normal of a counterclockwise edge points to its right.
            let normal = Complex64::new(edge.im, -edge.re);
            let len = normal.norm();
            if len == 0.0 {
                return Err(GeometryError::InvalidDomain("repeated polygon vertex".into()));
            }
            let unit = normal / len;
            let offset = unit.re * a.re + unit.im * a.im;
            let hp = HalfPlane::from_outward_normal(unit, offset).ok_or_else(|| {
                GeometryError::InvalidDomain("degenerate polygon edge".into())
            })?;
            halfplanes.push(hp);
        }
        Self::new(halfplanes, Vec::new())
    }

    /// Builds a domain whose interior point is already known. The caller
    /// guarantees `interior` satisfies every constraint.
    pub(crate) fn with_interior(
        halfplanes: Vec<HalfPlane>,
        discs: Vec<Disc>,
        interior: Complex64,
    ) -> Self {
        let d = Self {
            halfplanes,
            discs,
            interior,
        };
        debug_assert!(d.contains(interior));
        d
    }

    pub fn halfplanes(&self) -> &[HalfPlane] {
        &self.halfplanes
    }

    pub fn discs(&self) -> &[Disc] {
        &self.discs
    }

    /// A point strictly inside the domain.
    pub fn interior_point(&self) -> Complex64 {
        self.interior
    }

    fn finite_halfplanes(&self) -> impl Iterator<Item = (Complex64, f64)> + '_ {
        self.halfplanes
            .iter()
            .filter_map(|h| h.bound.finite().map(|b| (h.direction.unit(), b)))
    }

    /// True when no constituent constrains the plane.
    pub fn is_whole_plane(&self) -> bool {
        self.discs.is_empty() && self.finite_halfplanes().next().is_none()
    }

    /// Size of the constituents' data; a cheap stand-in for the diameter used
    /// to scale tolerances.
    pub fn magnitude(&self) -> f64 {
        let hp = self.finite_halfplanes().map(|(_, b)| b.abs());
        let dc = self.discs.iter().map(|d| d.center.norm() + d.radius);
        hp.chain(dc).fold(0.0, f64::max)
    }

    /// Strict membership in every constituent.
    pub fn contains(&self, z: Complex64) -> bool {
        self.halfplanes.iter().all(|h| h.contains(z)) && self.discs.iter().all(|d| d.contains(z))
    }

    /// Smallest constraint slack at `z`; positive exactly on the domain.
    pub fn slack(&self, z: Complex64) -> f64 {
        let hp = self.finite_halfplanes().map(|(u, b)| b - (u * z).re);
        let dc = self.discs.iter().map(|d| d.radius - (z - d.center).norm());
        hp.chain(dc).fold(f64::INFINITY, f64::min)
    }

    /// Point of maximal slack inside a large box, by nested golden-section
    /// search on the concave slack function.
    fn deepest_point(&self) -> (Complex64, f64) {
        if self.is_whole_plane() {
            return (Complex64::new(0.0, 0.0), f64::INFINITY);
        }
        let reach = 1e3 * (1.0 + self.magnitude());
        let best_over_y = |x: f64| -> (f64, f64) {
            let y = golden_max(|y| self.slack(Complex64::new(x, y)), -reach, reach);
            (y, self.slack(Complex64::new(x, y)))
        };
        let x = golden_max(|x| best_over_y(x).1, -reach, reach);
        let (y, s) = best_over_y(x);
        (Complex64::new(x, y), s)
    }

    /// Interval of the parameter `t` for which `(v + i·t)·s̄` lies in the
    /// closure of the domain, or `None` when that line misses it.
    fn line_section(&self, s: Complex64, v: f64) -> Option<(f64, f64)> {
        let mut lo = f64::NEG_INFINITY;
        let mut hi = f64::INFINITY;
        let sbar = s.conj();
        for (u, b) in self.finite_halfplanes() {
            // Re(u·s̄·(v + i t)) = a·v − c·t
            let w = u * sbar;
            let (a, c) = (w.re, w.im);
            let rhs = b - a * v;
            let slop = 4.0 * f64::EPSILON * (b.abs() + (a * v).abs());
            if c.abs() <= PARALLEL_EPS {
                if rhs < -slop {
                    return None;
                }
            } else if c > 0.0 {
                lo = lo.max(-rhs / c);
            } else {
                hi = hi.min(-rhs / c);
            }
        }
        for d in &self.discs {
            let m = s * d.center;
            let dv = v - m.re;
            let slop = 4.0 * f64::EPSILON * (v.abs() + m.re.abs() + d.radius);
            if dv.abs() > d.radius + slop {
                return None;
            }
            let half = (d.radius * d.radius - dv * dv).max(0.0).sqrt();
            lo = lo.max(m.im - half);
            hi = hi.min(m.im + half);
        }
        (lo <= hi).then_some((lo, hi))
    }

    /// Whether `Re(s·z)` is bounded above on the domain.
    fn bounded_in(&self, s: Direction) -> bool {
        if !self.discs.is_empty() {
            return true;
        }
        let normals: Vec<Complex64> = self.finite_halfplanes().map(|(u, _)| u).collect();
        if normals.is_empty() {
            return false;
        }
        // Unbounded iff some recession direction w has Re(s·w) > 0. The best
        // w is the unconstrained maximizer or an edge ray of the cone.
        let su = s.unit();
        let i = Complex64::new(0.0, 1.0);
        let candidates = std::iter::once(su.conj())
            .chain(normals.iter().map(|u| i * u.conj()))
            .chain(normals.iter().map(|u| -i * u.conj()));
        for w in candidates {
            let in_cone = normals.iter().all(|u| (u * w).re <= 1e-12);
            if in_cone && (su * w).re > 1e-12 {
                return false;
            }
        }
        true
    }

    /// Largest `Re(s·v)` over the candidate extreme points that lie in the
    /// closure: pairwise intersections of constraint boundaries and the
    /// points `c + r·s̄` where each circle is supported in direction `s`.
    fn best_candidate(&self, su: Complex64) -> Option<f64> {
        let lines: Vec<(Complex64, f64)> = self.finite_halfplanes().collect();
        let mut cands: Vec<Complex64> = Vec::new();
        let i = Complex64::new(0.0, 1.0);
        for (k, &(u1, b1)) in lines.iter().enumerate() {
            for &(u2, b2) in &lines[k + 1..] {
                // Re(u·z) = u.re·x − u.im·y
                let det = -u1.re * u2.im + u1.im * u2.re;
                if det.abs() > PARALLEL_EPS {
                    let x = (-b1 * u2.im + u1.im * b2) / det;
                    let y = (u1.re * b2 - u2.re * b1) / det;
                    cands.push(Complex64::new(x, y));
                }
            }
            // The line is b·ū + t·iū.
            let base = b1 * u1.conj();
            let dir = i * u1.conj();
            for d in &self.discs {
                let off = base - d.center;
                let pb = (off * dir.conj()).re;
                let q = off.norm_sqr() - d.radius * d.radius;
                let mut disc = pb * pb - q;
                if disc < 0.0 && disc > -64.0 * f64::EPSILON * (pb * pb + q.abs()) {
                    disc = 0.0;
                }
                if disc >= 0.0 {
                    let root = disc.sqrt();
                    cands.push(base + dir * (-pb - root));
                    cands.push(base + dir * (-pb + root));
                }
            }
        }
        for (k, d1) in self.discs.iter().enumerate() {
            cands.push(d1.center + d1.radius * su.conj());
            for d2 in &self.discs[k + 1..] {
                let gap = d2.center - d1.center;
                let dist = gap.norm();
                if dist == 0.0 || dist > d1.radius + d2.radius || dist < (d1.radius - d2.radius).abs() {
                    continue;
                }
                let along = (d1.radius * d1.radius - d2.radius * d2.radius + dist * dist) / (2.0 * dist);
                let h = (d1.radius * d1.radius - along * along).max(0.0).sqrt();
                let e = gap / dist;
                let m = d1.center + e * along;
                cands.push(m + i * e * h);
                cands.push(m - i * e * h);
            }
        }
        let feasible = |v: Complex64| {
            let slop = 64.0 * f64::EPSILON * (1.0 + v.norm());
            lines.iter().all(|&(u, b)| (u * v).re <= b + slop * (1.0 + b.abs()))
                && self
                    .discs
                    .iter()
                    .all(|d| (v - d.center).norm() <= d.radius + slop * (1.0 + d.center.norm() + d.radius))
        };
        cands
            .into_iter()
            .filter(|&v| feasible(v))
            .map(|v| (su * v).re)
            .fold(None, |best: Option<f64>, x| Some(best.map_or(x, |m| m.max(x))))
    }

    /// Support value `d(s) = sup_{σ∈D} Re(s·σ)`.
    ///
    /// `+∞` exactly when the domain is unbounded in direction `s̄`. Finite
    /// values come from the tightest constituent bound when that bound is
    /// attained, then from the closed-form candidate extreme points, and as a
    /// last resort from bisection on the level of the supporting line.
    pub fn support_value(&self, s: Direction) -> Extended {
        if self.is_whole_plane() || !self.bounded_in(s) {
            return Extended::PosInf;
        }
        let su = s.unit();
        let cap = self
            .halfplanes
            .iter()
            .map(|h| h.support(s))
            .chain(self.discs.iter().map(|d| d.support(s)))
            .fold(Extended::PosInf, Extended::min);
        if let Extended::Finite(c) = cap {
            if self.line_section(su, c).is_some() {
                return Extended::Finite(c);
            }
        }

        if let Some(d) = self.best_candidate(su) {
            let probe = 1e-12 * (1.0 + d.abs() + self.magnitude());
            if self.line_section(su, d + probe).is_none() {
                return Extended::Finite(d);
            }
        }

        let mut lo = (su * self.interior).re;
        let mut hi = match cap {
            Extended::Finite(c) => c,
            Extended::PosInf => {
                let mut step = 1.0 + self.magnitude();
                let mut hi = lo + step;
                while self.line_section(su, hi).is_some() {
                    lo = hi;
                    step *= 2.0;
                    hi = lo + step;
                    if !hi.is_finite() || hi > 1e300 {
                        return Extended::PosInf;
                    }
                }
                hi
            }
        };
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.line_section(su, mid).is_some() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Extended::Finite(0.5 * (lo + hi))
    }

    /// Directions with finite support value: the polar of the recession cone.
    pub fn finite_directions(&self) -> DirectionSet {
        use std::f64::consts::{FRAC_PI_2, PI};
        if self.is_whole_plane() {
            return DirectionSet::empty();
        }
        if !self.discs.is_empty() {
            return DirectionSet::full();
        }
        // Recession cone: Re(u·w) ≤ 0 ⇔ arg w ∈ [π/2 − θ, 3π/2 − θ].
        let mut cone = DirectionSet::full();
        for h in &self.halfplanes {
            if h.bound.is_finite() {
                let th = h.direction.angle();
                let half = DirectionSet::from_arcs([Arc::new(FRAC_PI_2 - th, FRAC_PI_2 - th + PI)]);
                cone = cone.intersect(&half, 1e-12);
            }
        }
        if cone.is_empty() {
            return DirectionSet::full();
        }
        // Polar: Re(s·w) ≤ 0 for every w in the cone; enough to check the
        // extreme rays of each cone arc.
        let mut polar = DirectionSet::full();
        for arc in cone.arcs() {
            for a in [arc.lo, arc.hi] {
                let half = DirectionSet::from_arcs([Arc::new(FRAC_PI_2 - a, FRAC_PI_2 - a + PI)]);
                polar = polar.intersect(&half, 1e-12);
            }
        }
        polar
    }

    /// Contact directions `T_D(p) = {s : d(s) = Re(s·p)}` of a boundary
    /// point, computed as `{s : d(s) − Re(s·p) ≤ tol·scale}` with
    /// `scale = 1 + |p| + magnitude`.
    pub fn contact_directions(&self, p: Complex64, tol: f64) -> Result<DirectionSet, GeometryError> {
        if !(tol > 0.0) || !p.re.is_finite() || !p.im.is_finite() {
            return Err(GeometryError::InvalidArgument(
                "tolerance must be positive and the point finite".into(),
            ));
        }
        let scale = 1.0 + p.norm() + self.magnitude();
        let eps = tol * scale;
        if self.slack(p) > eps {
            return Err(GeometryError::PointNotOnBoundary {
                distance: -self.slack(p),
                tol: eps,
            });
        }
        let finite = self.finite_directions();
        let gap = |angle: f64| -> f64 {
            let s = Direction::new(angle);
            match self.support_value(s) {
                Extended::Finite(d) => d - (s.unit() * p).re,
                Extended::PosInf => f64::INFINITY,
            }
        };

        let mut arcs = Vec::new();
        let mut min_gap = f64::INFINITY;
        for arc in finite.arcs() {
            let (found, best) = contact_arcs_on(arc, &gap, eps);
            min_gap = min_gap.min(best);
            arcs.extend(found);
        }
        if -min_gap > eps || arcs.is_empty() {
            return Err(GeometryError::PointNotOnBoundary {
                distance: (-min_gap).max(0.0),
                tol: eps,
            });
        }
        Ok(DirectionSet::from_arcs(arcs))
    }

    /// Intersection of the supporting half-planes `{Re(s·z) < d(s)}` over
    /// `grid` sampled directions per arc of `directions`, arc endpoints
    /// included. Directions with `d(s) = +∞` add no constraint.
    pub fn s_convex_hull(
        &self,
        directions: &DirectionSet,
        grid: usize,
    ) -> Result<ConvexDomain, GeometryError> {
        if directions.is_empty() {
            return Err(GeometryError::EmptyDirectionSet);
        }
        if grid == 0 {
            return Err(GeometryError::InvalidArgument("grid must be positive".into()));
        }
        let mut angles: Vec<f64> = directions
            .arcs()
            .iter()
            .flat_map(|a| a.sample(grid.max(2)))
            .collect();
        angles.sort_by(f64::total_cmp);
        angles.dedup();
        let halfplanes: Vec<HalfPlane> = angles
            .par_iter()
            .filter_map(|&a| {
                let s = Direction::new(a);
                match self.support_value(s) {
                    Extended::Finite(d) => Some(HalfPlane::new(s, d)),
                    Extended::PosInf => None,
                }
            })
            .collect();
        Ok(ConvexDomain::with_interior(halfplanes, Vec::new(), self.interior))
    }

    /// Image under a real translation `z ↦ z + h`.
    pub fn translate(&self, h: f64) -> ConvexDomain {
        let shift = Complex64::new(h, 0.0);
        let halfplanes: Vec<HalfPlane> = self
            .halfplanes
            .iter()
            .map(|hp| HalfPlane {
                direction: hp.direction,
                bound: match hp.bound {
                    Extended::Finite(b) => Extended::Finite(b + (hp.direction.unit() * shift).re),
                    Extended::PosInf => Extended::PosInf,
                },
            })
            .collect();
        let discs: Vec<Disc> = self
            .discs
            .iter()
            .map(|d| Disc::new(d.center + shift, d.radius))
            .collect();
        let interior = self.interior + shift;
        if Self::with_interior_checked(&halfplanes, &discs, interior) {
            Self::with_interior(halfplanes, discs, interior)
        } else {
            Self::new(halfplanes, discs).expect("translate preserves nonempty interior")
        }
    }

    /// Image under complex conjugation `z ↦ z̄`.
    pub fn conjugate(&self) -> ConvexDomain {
        let halfplanes = self
            .halfplanes
            .iter()
            .map(|hp| HalfPlane {
                direction: hp.direction.conj(),
                bound: hp.bound,
            })
            .collect();
        let discs = self
            .discs
            .iter()
            .map(|d| Disc::new(d.center.conj(), d.radius))
            .collect();
        Self::with_interior(halfplanes, discs, self.interior.conj())
    }

    fn with_interior_checked(halfplanes: &[HalfPlane], discs: &[Disc], z: Complex64) -> bool {
        halfplanes.iter().all(|h| h.contains(z)) && discs.iter().all(|d| d.contains(z))
    }

    /// Bounded real interval `(lo, hi)` of `D ∩ ℝ`, possibly with infinite
    /// ends, or `None` when the domain misses the real axis.
    pub fn real_section(&self) -> Option<(f64, f64)> {
        // The real axis is the line Re(−i·z) = 0, parametrised by t = −Re z.
        let s = Complex64::new(0.0, -1.0);
        let (lo, hi) = self.line_section(s, 0.0)?;
        let (a, b) = (-hi, -lo);
        let mid = if a.is_finite() && b.is_finite() {
            0.5 * (a + b)
        } else if a.is_finite() {
            a + 1.0
        } else if b.is_finite() {
            b - 1.0
        } else {
            0.0
        };
        // The closed section can be a single tangency point; require an
        // actual interior real point.
        if a < b && self.contains(Complex64::new(mid, 0.0)) {
            Some((a, b))
        } else {
            None
        }
    }
}

/// Scans one arc of finite support values for angles where `gap ≤ eps`.
/// Returns the arcs found and the smallest gap seen.
fn contact_arcs_on(arc: &Arc, gap: &(impl Fn(f64) -> f64 + Sync), eps: f64) -> (Vec<Arc>, f64) {
    const SAMPLES: usize = 2049;
    if arc.is_point() {
        let g = gap(arc.lo);
        let found = if g <= eps { vec![*arc] } else { Vec::new() };
        return (found, g);
    }
    let width = arc.width();
    let full = arc.is_full();
    let step = width / (SAMPLES - 1) as f64;
    // Offsets along the arc; the full circle omits the duplicate endpoint.
    let count = if full { SAMPLES - 1 } else { SAMPLES };
    let at = |t: f64| gap(arc.lo + t);
    let mut samples: Vec<(f64, f64)> = (0..count)
        .into_par_iter()
        .map(|k| {
            let t = step * k as f64;
            (t, at(t))
        })
        .collect();

    // Refine the minimum so that contact sets narrower than the grid are
    // still found.
    let &(tmin, gmin) = samples
        .iter()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("nonempty grid");
    let (a, b) = if full {
        (tmin - step, tmin + step)
    } else {
        ((tmin - step).max(0.0), (tmin + step).min(width))
    };
    let tstar = golden_max(|t| -at(t), a, b);
    let gstar = at(tstar);
    if gstar < gmin {
        let t = if full { tstar.rem_euclid(width) } else { tstar };
        let pos = samples.partition_point(|&(u, _)| u < t);
        if samples.get(pos).is_none_or(|&(u, _)| u != t) {
            samples.insert(pos, (t, gstar));
        }
    }
    let min_gap = samples.iter().map(|&(_, g)| g).fold(f64::INFINITY, f64::min);
    if samples.iter().all(|&(_, g)| g <= eps) {
        return (vec![*arc], min_gap);
    }

    // On the full circle, rotate so the scan starts and ends at the same
    // failing sample; offsets past the seam are unrolled beyond `width`.
    if full {
        let first_fail = samples
            .iter()
            .position(|&(_, g)| g > eps)
            .expect("some sample fails");
        samples.rotate_left(first_fail);
        let base = samples[0].0;
        for entry in samples.iter_mut() {
            if entry.0 < base {
                entry.0 += width;
            }
        }
        let closing = (samples[0].0 + width, samples[0].1);
        samples.push(closing);
    }

    let refine = |inside: f64, outside: f64| -> f64 {
        let (mut a, mut b) = (inside, outside);
        for _ in 0..60 {
            let mid = 0.5 * (a + b);
            if at(mid) <= eps {
                a = mid;
            } else {
                b = mid;
            }
        }
        a
    };
    let m = samples.len();
    let mut out = Vec::new();
    let mut k = 0;
    while k < m {
        if samples[k].1 > eps {
            k += 1;
            continue;
        }
        let first = k;
        while k < m && samples[k].1 <= eps {
            k += 1;
        }
        let last = k - 1;
        let lo = if first == 0 {
            0.0
        } else {
            refine(samples[first].0, samples[first - 1].0)
        };
        let hi = if last == m - 1 {
            width
        } else {
            refine(samples[last].0, samples[last + 1].0)
        };
        out.push(Arc::new(arc.lo + lo, arc.lo + hi));
    }
    (out, min_gap)
}

/// Golden-section search for the maximum of a unimodal function on `[a, b]`.
pub(crate) fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let mut c = b - GOLDEN * (b - a);
    let mut d = a + GOLDEN * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..200 {
        if (b - a).abs() <= 1e-15 * (1.0 + a.abs().max(b.abs())) {
            break;
        }
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - GOLDEN * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + GOLDEN * (b - a);
            fd = f(d);
        }
    }
    if fc >= fd {
        c
    } else {
        d
    }
}

#[cfg(test)]
mod tests {
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, SQRT_2};

    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn left_half_plane() -> ConvexDomain {
        ConvexDomain::half_plane(0.0, 0.0).unwrap()
    }

    /// Brute-force `max Re(s·z)` over an `n × n` grid of the closed rectangle.
    fn grid_support(x0: f64, x1: f64, y0: f64, y1: f64, s: Direction, n: usize) -> f64 {
        let su = s.unit();
        let mut best = f64::NEG_INFINITY;
        for i in 0..n {
            for j in 0..n {
                let x = x0 + (x1 - x0) * i as f64 / (n - 1) as f64;
                let y = y0 + (y1 - y0) * j as f64 / (n - 1) as f64;
                best = best.max((su * c(x, y)).re);
            }
        }
        best
    }

    #[test]
    fn support_of_left_half_plane() {
        let d = left_half_plane();
        assert_eq!(d.support_value(Direction::new(0.0)), Extended::Finite(0.0));
        assert_eq!(d.support_value(Direction::new(0.3)), Extended::PosInf);
        assert_eq!(d.support_value(Direction::new(FRAC_PI_2)), Extended::PosInf);
    }

    #[test]
    fn support_of_unit_disc_is_one_everywhere() {
        let d = ConvexDomain::disc(c(0.0, 0.0), 1.0).unwrap();
        for k in 0..16 {
            let s = Direction::new(k as f64 * PI / 8.0 - PI + 0.01);
            let v = d.support_value(s).finite().unwrap();
            assert!((v - 1.0).abs() < 1e-15, "{v}");
        }
    }

    #[test]
    fn support_of_square_on_the_diagonal() {
        let sq = ConvexDomain::rectangle(-1.0, 1.0, -1.0, 1.0).unwrap();
        let s = Direction::new(FRAC_PI_4);
        let oracle = grid_support(-1.0, 1.0, -1.0, 1.0, s, 201);
        let v = sq.support_value(s).finite().unwrap();
        assert!((oracle - SQRT_2).abs() < 1e-12);
        assert!((v - oracle).abs() < 1e-12, "{v} vs {oracle}");
    }

    #[test]
    fn support_of_polygon_matches_vertex_maximum() {
        let verts = [c(0.0, 0.0), c(2.0, 0.5), c(1.5, 2.0), c(-0.5, 1.0)];
        let poly = ConvexDomain::polygon(&verts).unwrap();
        for k in 0..37 {
            let s = Direction::new(-PI + 0.17 * k as f64);
            let expect = verts
                .iter()
                .map(|v| (s.unit() * v).re)
                .fold(f64::NEG_INFINITY, f64::max);
            let got = poly.support_value(s).finite().unwrap();
            assert!((got - expect).abs() < 1e-12, "{k}: {got} vs {expect}");
        }
    }

    #[test]
    fn unbounded_wedge_has_infinite_support_outside_polar_cone() {
        // Re z < 0 and Im z < 0.
        let wedge = ConvexDomain::new(
            vec![
                HalfPlane::new(Direction::new(0.0), 0.0),
                HalfPlane::new(Direction::new(-FRAC_PI_2), 0.0),
            ],
            vec![],
        )
        .unwrap();
        assert!(wedge.support_value(Direction::new(-FRAC_PI_4)).finite().unwrap().abs() < 1e-12);
        assert_eq!(wedge.support_value(Direction::new(0.1)), Extended::PosInf);
        let fin = wedge.finite_directions();
        assert_eq!(fin.arcs().len(), 1);
        assert!((fin.arcs()[0].lo + FRAC_PI_2).abs() < 1e-12);
        assert!(fin.arcs()[0].hi.abs() < 1e-12);
    }

    #[test]
    fn empty_intersection_is_rejected() {
        let err = ConvexDomain::new(
            vec![
                HalfPlane::new(Direction::new(0.0), -1.0),
                HalfPlane::new(Direction::new(PI), -1.0),
            ],
            vec![],
        );
        assert!(matches!(err, Err(GeometryError::InvalidDomain(_))));

        let tangent = ConvexDomain::new(
            vec![],
            vec![Disc::new(c(-1.0, 0.0), 1.0), Disc::new(c(1.0, 0.0), 1.0)],
        );
        assert!(tangent.is_err());
        assert!(ConvexDomain::disc(c(0.0, 0.0), -1.0).is_err());
    }

    #[test]
    fn thin_domains_are_accepted() {
        let strip = ConvexDomain::rectangle(-1.0, 1.0, -1e-6, 1e-6).unwrap();
        assert!(strip.contains(strip.interior_point()));
    }

    #[test]
    fn contains_is_strict() {
        let d = left_half_plane();
        assert!(d.contains(c(-1.0, 0.0)));
        assert!(!d.contains(c(0.0, 0.0)));
        let sq = ConvexDomain::rectangle(-1.0, 1.0, -1.0, 1.0).unwrap();
        assert!(sq.contains(c(0.5, 0.5)));
        assert!(!sq.contains(c(1.0, 0.5)));
    }

    #[test]
    fn contact_of_half_plane_at_origin() {
        let t = left_half_plane().contact_directions(c(0.0, 0.0), 1e-9).unwrap();
        assert_eq!(t.arcs(), &[Arc::point(0.0)]);
    }

    #[test]
    fn contact_of_tangent_disc_is_a_tiny_arc_around_zero() {
        let d = ConvexDomain::disc(c(-1.0, 0.0), 1.0).unwrap();
        let tol = 1e-9;
        let t = d.contact_directions(c(0.0, 0.0), tol).unwrap();
        assert_eq!(t.arcs().len(), 1);
        assert!(t.contains(Direction::new(0.0), 0.0));
        // 1 − cos φ ≤ tol·scale  ⇒  |φ| ≲ sqrt(2·tol·scale)
        let scale = 1.0 + 0.0 + 2.0;
        let half = (2.0 * tol * scale).sqrt();
        let arc = t.arcs()[0];
        assert!((arc.hi - half).abs() < 1e-3 * half, "{arc:?}");
        assert!((arc.lo + half).abs() < 1e-3 * half, "{arc:?}");
    }

    #[test]
    fn contact_of_square_corner_matches_brute_force() {
        let sq = ConvexDomain::rectangle(-1.0, 0.0, -1.0, 0.0).unwrap();
        let t = sq.contact_directions(c(0.0, 0.0), 1e-9).unwrap();
        // Oracle: d(s) over an angle grid by grid maximisation.
        for k in 0..=64 {
            let phi = -PI + k as f64 * PI / 32.0 + 1e-3;
            let s = Direction::new(phi);
            let d = grid_support(-1.0, 0.0, -1.0, 0.0, s, 101);
            let zero = d.abs() < 1e-12;
            assert_eq!(t.contains(s, 0.0), zero, "phi={phi} d={d}");
        }
        let arc = t.arcs()[0];
        assert_eq!(t.arcs().len(), 1);
        assert!((arc.lo + FRAC_PI_2).abs() < 1e-8 && arc.hi.abs() < 1e-8, "{arc:?}");
    }

    #[test]
    fn interior_and_distant_points_are_not_boundary_points() {
        let d = left_half_plane();
        assert!(matches!(
            d.contact_directions(c(-1.0, 0.0), 1e-9),
            Err(GeometryError::PointNotOnBoundary { .. })
        ));
        assert!(matches!(
            d.contact_directions(c(0.5, 0.0), 1e-9),
            Err(GeometryError::PointNotOnBoundary { .. })
        ));
        let disc = ConvexDomain::disc(c(-1.0, 0.0), 1.0).unwrap();
        assert!(disc.contact_directions(c(1e-3, 0.0), 1e-9).is_err());
    }

    #[test]
    fn hull_over_the_normal_direction_is_the_half_plane() {
        let d = left_half_plane();
        let hull = d.s_convex_hull(&DirectionSet::point(Direction::new(0.0)), 257).unwrap();
        assert_eq!(hull.halfplanes(), d.halfplanes());
    }

    #[test]
    fn hull_over_other_directions_is_the_plane() {
        let d = left_half_plane();
        let hull = d
            .s_convex_hull(&DirectionSet::point(Direction::new(FRAC_PI_2)), 257)
            .unwrap();
        assert!(hull.is_whole_plane());
        assert!(hull.contains(c(1e6, -3.0)));
    }

    #[test]
    fn full_circle_hull_of_disc_converges() {
        let d = ConvexDomain::disc(c(0.0, 0.0), 1.0).unwrap();
        let pts: Vec<Complex64> = (0..400)
            .map(|k| Complex64::from_polar(0.9 + 0.2 * ((k * 37 % 100) as f64 / 100.0), k as f64 * 0.7))
            .collect();
        let mut last = usize::MAX;
        for grid in [9, 17, 33, 65, 129, 257] {
            let hull = d.s_convex_hull(&DirectionSet::full(), grid).unwrap();
            let bad = pts.iter().filter(|&&z| hull.contains(z) != d.contains(z)).count();
            assert!(bad <= last, "grid {grid}: {bad} > {last}");
            last = bad;
        }
        assert!(last <= 4, "{last}");
    }

    #[test]
    fn empty_direction_set_is_rejected() {
        assert_eq!(
            left_half_plane().s_convex_hull(&DirectionSet::empty(), 10),
            Err(GeometryError::EmptyDirectionSet)
        );
    }

    #[test]
    fn real_section_of_domains() {
        assert_eq!(left_half_plane().real_section(), Some((f64::NEG_INFINITY, 0.0)));
        let upper = ConvexDomain::half_plane(FRAC_PI_2, -1.0).unwrap(); // Im z > 1
        assert_eq!(upper.real_section(), None);
        let (a, b) = ConvexDomain::disc(c(-1.0, 0.5), 1.0).unwrap().real_section().unwrap();
        assert!((a - (-1.0 - 0.75f64.sqrt())).abs() < 1e-12);
        assert!((b - (-1.0 + 0.75f64.sqrt())).abs() < 1e-12);
    }
}
