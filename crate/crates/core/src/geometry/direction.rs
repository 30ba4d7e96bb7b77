//! Points of the unit circle and closed subsets of it made of finitely many arcs.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Map an angle into `(-π, π]`.
pub fn normalize_angle(angle: f64) -> f64 {
    let r = angle.rem_euclid(TAU);
    if r > PI {
        r - TAU
    } else {
        r
    }
}

/// Offset of `angle` from `base`, measured counterclockwise, in `[0, 2π)`.
pub fn ccw_offset(base: f64, angle: f64) -> f64 {
    let r = (angle - base).rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Shortest angular distance between two angles, in `[0, π]`.
pub fn angular_distance(a: f64, b: f64) -> f64 {
    normalize_angle(a - b).abs()
}

/// A unit complex number `e^{i·angle}`, stored by its angle in `(-π, π]`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct Direction {
    angle: f64,
}

impl Direction {
    pub fn new(angle: f64) -> Self {
        Self {
            angle: normalize_angle(angle),
        }
    }

    /// Direction of a nonzero complex number.
    pub fn of(z: Complex64) -> Option<Self> {
        if z == Complex64::new(0.0, 0.0) || !z.re.is_finite() || !z.im.is_finite() {
            return None;
        }
        Some(Self::new(z.im.atan2(z.re)))
    }

    #[inline]
    pub fn angle(&self) -> f64 {
        self.angle
    }

    #[inline]
    pub fn unit(&self) -> Complex64 {
        Complex64::from_polar(1.0, self.angle)
    }

    pub fn conj(&self) -> Self {
        Self::new(-self.angle)
    }

    /// Shortest angular distance to `other`.
    pub fn distance(&self, other: &Direction) -> f64 {
        angular_distance(self.angle, other.angle)
    }
}

/// Closed arc of the unit circle running counterclockwise from `lo` to `hi`.
///
/// `lo` lies in `[-π, π]` and `0 ≤ hi - lo ≤ 2π`, so `hi` may exceed `π` for
/// arcs that wrap past the negative real axis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Arc {
    pub lo: f64,
    pub hi: f64,
}

impl Arc {
    pub fn new(lo: f64, hi: f64) -> Self {
        let width = (hi - lo).clamp(0.0, TAU);
        let lo = normalize_angle(lo);
        Self { lo, hi: lo + width }
    }

    pub fn point(angle: f64) -> Self {
        let a = normalize_angle(angle);
        Self { lo: a, hi: a }
    }

    pub fn full() -> Self {
        Self { lo: -PI, hi: PI }
    }

    #[inline]
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn is_full(&self) -> bool {
        self.width() >= TAU
    }

    pub fn is_point(&self) -> bool {
        self.width() == 0.0
    }

    pub fn midpoint(&self) -> Direction {
        Direction::new(0.5 * (self.lo + self.hi))
    }

    /// Whether `angle` lies on the arc or within `tol` radians of it.
    pub fn contains_angle(&self, angle: f64, tol: f64) -> bool {
        if self.is_full() {
            return true;
        }
        let off = ccw_offset(self.lo, angle);
        off <= self.width() + tol || off >= TAU - tol
    }

    /// `n` evenly spaced angles covering the arc, endpoints included.
    ///
    /// A point arc yields a single angle. A full circle omits the duplicated
    /// endpoint.
    pub fn sample(&self, n: usize) -> Vec<f64> {
        if self.is_point() || n <= 1 {
            return vec![if self.is_point() {
                self.lo
            } else {
                self.midpoint().angle()
            }];
        }
        let w = self.width();
        let count = if self.is_full() { n - 1 } else { n };
        let denom = (n - 1) as f64;
        (0..count)
            .map(|k| normalize_angle(self.lo + w * (k as f64) / denom))
            .collect()
    }

    /// Overlap of two closed arcs, with endpoints allowed to miss by `tol`.
    ///
    /// Returns the overlapping arcs. A near miss within `tol` becomes a point
    /// arc at the midpoint of the gap.
    pub fn overlap(&self, other: &Arc, tol: f64) -> Vec<Arc> {
        if self.is_full() {
            return vec![*other];
        }
        if other.is_full() {
            return vec![*self];
        }
        let mut out = Vec::new();
        for k in [-1.0, 0.0, 1.0] {
            let shift = k * TAU;
            let lo = self.lo.max(other.lo + shift);
            let hi = self.hi.min(other.hi + shift);
            if lo <= hi {
                out.push(Arc::new(lo, hi));
            } else if lo - hi <= tol {
                out.push(Arc::point(0.5 * (lo + hi)));
            }
        }
        out
    }
}

/// A closed subset of the unit circle: finitely many disjoint closed arcs.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct DirectionSet {
    arcs: Vec<Arc>,
}

impl DirectionSet {
    pub fn empty() -> Self {
        Self { arcs: Vec::new() }
    }

    pub fn full() -> Self {
        Self {
            arcs: vec![Arc::full()],
        }
    }

    pub fn point(direction: Direction) -> Self {
        Self {
            arcs: vec![Arc::point(direction.angle())],
        }
    }

    /// Build from arbitrary arcs, merging any that touch or overlap.
    pub fn from_arcs(arcs: impl IntoIterator<Item = Arc>) -> Self {
        let mut arcs: Vec<Arc> = arcs.into_iter().collect();
        if arcs.iter().any(Arc::is_full) {
            return Self::full();
        }
        if arcs.is_empty() {
            return Self::empty();
        }
        arcs.sort_by(|a, b| a.lo.total_cmp(&b.lo).then(a.hi.total_cmp(&b.hi)));
        let mut merged: Vec<Arc> = Vec::with_capacity(arcs.len());
        for arc in arcs {
            match merged.last_mut() {
                Some(last) if arc.lo <= last.hi => last.hi = last.hi.max(arc.hi),
                _ => merged.push(arc),
            }
        }
        // Arcs running past π can swallow arcs at the start of the list.
        while merged.len() > 1 {
            let last = *merged.last().expect("nonempty");
            let first = merged[0];
            if last.hi - TAU >= first.lo {
                merged.remove(0);
                let tail = merged.last_mut().expect("nonempty");
                tail.hi = tail.hi.max(first.hi + TAU);
            } else {
                break;
            }
        }
        if merged.iter().any(|a| a.width() >= TAU) {
            return Self::full();
        }
        Self { arcs: merged }
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn is_empty(&self) -> bool {
        self.arcs.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.arcs.len() == 1 && self.arcs[0].is_full()
    }

    pub fn contains(&self, direction: Direction, tol: f64) -> bool {
        self.arcs
            .iter()
            .any(|a| a.contains_angle(direction.angle(), tol))
    }

    /// Intersection of two closed sets, arc endpoints matched up to `tol`.
    pub fn intersect(&self, other: &DirectionSet, tol: f64) -> DirectionSet {
        let mut parts = Vec::new();
        for a in &self.arcs {
            for b in &other.arcs {
                parts.extend(a.overlap(b, tol));
            }
        }
        DirectionSet::from_arcs(parts)
    }

    /// A representative direction of the set: the midpoint of its widest arc.
    pub fn witness(&self) -> Option<Direction> {
        self.arcs
            .iter()
            .max_by(|a, b| a.width().total_cmp(&b.width()))
            .map(Arc::midpoint)
    }

    /// Total angular measure.
    pub fn measure(&self) -> f64 {
        self.arcs.iter().map(Arc::width).sum()
    }

    /// Arcs as `[lo, hi]` pairs, the wire form.
    pub fn to_pairs(&self) -> Vec<[f64; 2]> {
        self.arcs.iter().map(|a| [a.lo, a.hi]).collect()
    }

    pub fn from_pairs(pairs: &[[f64; 2]]) -> Self {
        Self::from_arcs(pairs.iter().map(|p| Arc::new(p[0], p[1])))
    }
}

impl Serialize for DirectionSet {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.to_pairs().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for DirectionSet {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let pairs = Vec::<[f64; 2]>::deserialize(deserializer)?;
        if pairs.iter().flatten().any(|x| !x.is_finite()) {
            return Err(serde::de::Error::custom("arc endpoints must be finite"));
        }
        if pairs.iter().any(|p| p[1] < p[0]) {
            return Err(serde::de::Error::custom("arc must satisfy lo <= hi"));
        }
        Ok(Self::from_pairs(&pairs))
    }
}
