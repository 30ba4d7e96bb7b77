//! Exponent sequences: limit directions at infinity, angle membership,
//! the growth condition `limsup Re v / ln|v| = ∞`, and greedy thinning to a
//! geometrically separated subsequence.

use std::cmp::Ordering;
use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
use thiserror::Error;

use crate::geometry::{angular_distance, Arc, Direction, DirectionSet, Extended};

/// Default half-width scale for merging observed directions into arcs.
pub const DEFAULT_CLUSTER_TOL: f64 = 1e-3;

/// Finite-prefix stand-in for `+∞` in the growth condition: estimates of
/// `limsup Re v / ln|v|` above this count as unbounded.
pub const DEFAULT_GROWTH_THRESHOLD: f64 = 1e6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExponentError {
    #[error("invalid exponent sequence: {0}")]
    InvalidSequence(String),
    #[error("invalid angle: {0}")]
    InvalidAngle(String),
    #[error("no exponent beyond radius {radius} and no tail model")]
    NoTail { radius: f64 },
    #[error("argument must be nonzero")]
    ZeroArgument,
    #[error("exponent {0} has non-positive real part")]
    NonPositiveRealPart(Complex64),
    #[error("fewer than two exponents lie in the angle and no tail model lies inside it")]
    NoExponentsInAngle,
}

/// Geometric ray `start · ratio^n · e^{i·angle}`, `n = 0, 1, 2, …`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RayTail {
    direction: Direction,
    ratio: f64,
    start: f64,
}

impl RayTail {
    pub fn new(angle: f64, ratio: f64, start: f64) -> Result<Self, ExponentError> {
        if !angle.is_finite() {
            return Err(ExponentError::InvalidSequence("ray angle must be finite".into()));
        }
        if !(ratio.is_finite() && ratio > 1.0) {
            return Err(ExponentError::InvalidSequence(format!(
                "ray ratio must exceed 1, got {ratio}"
            )));
        }
        if !(start.is_finite() && start > 0.0) {
            return Err(ExponentError::InvalidSequence(format!(
                "ray start must be positive, got {start}"
            )));
        }
        Ok(Self {
            direction: Direction::new(angle),
            ratio,
            start,
        })
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn ratio(&self) -> f64 {
        self.ratio
    }

    pub fn start(&self) -> f64 {
        self.start
    }

    pub fn modulus(&self, n: usize) -> f64 {
        self.start * self.ratio.powi(n as i32)
    }

    pub fn term(&self, n: usize) -> Complex64 {
        self.direction.unit() * self.modulus(n)
    }

    fn conj(&self) -> Self {
        Self {
            direction: self.direction.conj(),
            ..*self
        }
    }
}

/// A discrete exponent set: an explicit finite part plus an optional
/// geometric ray describing everything else.
#[derive(Clone, Debug, PartialEq)]
pub struct ExponentSequence {
    values: Vec<Complex64>,
    tail: Option<RayTail>,
}

impl ExponentSequence {
    /// Values must be finite, nonzero and pairwise distinct, and must not
    /// coincide with any term of the tail.
    pub fn new(values: Vec<Complex64>, tail: Option<RayTail>) -> Result<Self, ExponentError> {
        for v in &values {
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(ExponentError::InvalidSequence("exponents must be finite".into()));
            }
            if *v == Complex64::new(0.0, 0.0) {
                return Err(ExponentError::InvalidSequence("exponents must be nonzero".into()));
            }
        }
        let mut sorted = values.clone();
        sorted.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(ExponentError::InvalidSequence("exponents must be distinct".into()));
        }
        if let Some(t) = &tail {
            for v in &values {
                let n = ((v.norm() / t.start).ln() / t.ratio.ln()).round();
                if n >= 0.0 && t.term(n as usize) == *v {
                    return Err(ExponentError::InvalidSequence(format!(
                        "exponent {v} repeats a tail term"
                    )));
                }
            }
        }
        Ok(Self { values, tail })
    }

    pub fn from_values(values: Vec<Complex64>) -> Result<Self, ExponentError> {
        Self::new(values, None)
    }

    /// Pure geometric ray with no explicit prefix.
    pub fn ray(angle: f64, ratio: f64, start: f64) -> Result<Self, ExponentError> {
        Ok(Self {
            values: Vec::new(),
            tail: Some(RayTail::new(angle, ratio, start)?),
        })
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn tail(&self) -> Option<&RayTail> {
        self.tail.as_ref()
    }

    /// Whether the limit directions are known exactly (a tail model exists).
    pub fn has_exact_tail(&self) -> bool {
        self.tail.is_some()
    }

    /// Explicit values followed by `n_tail` tail terms, sorted by modulus.
    pub fn materialize(&self, n_tail: usize) -> Vec<Complex64> {
        let mut out = self.values.clone();
        if let Some(t) = &self.tail {
            out.extend((0..n_tail).map(|n| t.term(n)));
        }
        out.sort_by(|a, b| a.norm().total_cmp(&b.norm()));
        out
    }

    /// The first `count` terms in order of modulus, drawing on the tail as
    /// needed. Shorter than `count` only for finite sequences.
    pub fn first_terms(&self, count: usize) -> Vec<Complex64> {
        let mut all = self.materialize(if self.tail.is_some() { count } else { 0 });
        all.truncate(count);
        all
    }

    /// Multiply every exponent by the same positive real.
    pub fn scale(&self, factor: f64) -> Result<Self, ExponentError> {
        if !(factor.is_finite() && factor > 0.0) {
            return Err(ExponentError::InvalidSequence("scale must be positive".into()));
        }
        let values = self.values.iter().map(|v| v * factor).collect();
        let tail = match &self.tail {
            Some(t) => Some(RayTail::new(t.direction.angle(), t.ratio, t.start * factor)?),
            None => None,
        };
        Self::new(values, tail)
    }

    /// Complex conjugate of every exponent.
    pub fn conj(&self) -> Self {
        Self {
            values: self.values.iter().map(|v| v.conj()).collect(),
            tail: self.tail.map(|t| t.conj()),
        }
    }
}

/// Closed angle `A_α(β) = {z : |arg z − β| ≤ α}` with `α + |β| < π/2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Angle {
    beta: f64,
    alpha: f64,
}

impl Angle {
    pub fn new(beta: f64, alpha: f64) -> Result<Self, ExponentError> {
        if !(beta.is_finite() && beta.abs() < FRAC_PI_2) {
            return Err(ExponentError::InvalidAngle(format!(
                "beta must lie in (-π/2, π/2), got {beta}"
            )));
        }
        if !(alpha.is_finite() && alpha >= 0.0 && alpha + beta.abs() < FRAC_PI_2) {
            return Err(ExponentError::InvalidAngle(format!(
                "alpha must lie in [0, π/2 − |beta|), got {alpha}"
            )));
        }
        Ok(Self { beta, alpha })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// `cos(|β| + α)`: the smallest value of `cos arg z` over the angle.
    pub fn min_cos(&self) -> f64 {
        (self.beta.abs() + self.alpha).cos()
    }

    /// `cos(max(|β| − α, 0))`: the largest value of `cos arg z` over the angle.
    pub fn max_cos(&self) -> f64 {
        (self.beta.abs() - self.alpha).max(0.0).cos()
    }

    fn contains_angle(&self, theta: f64) -> bool {
        angular_distance(theta, self.beta) <= self.alpha + 4.0 * f64::EPSILON
    }
}

/// `|arg z − β| ≤ α`, boundary included.
pub fn in_angle(z: Complex64, angle: &Angle) -> Result<bool, ExponentError> {
    let dir = Direction::of(z).ok_or(ExponentError::ZeroArgument)?;
    Ok(angle.contains_angle(dir.angle()))
}

/// Default radius for [`limit_directions`]: the 75th-percentile modulus.
pub fn default_radius(seq: &ExponentSequence) -> Option<f64> {
    let mut moduli: Vec<f64> = seq.values.iter().map(|v| v.norm()).collect();
    if moduli.is_empty() {
        return None;
    }
    moduli.sort_by(f64::total_cmp);
    Some(moduli[(3 * (moduli.len() - 1)) / 4])
}

/// Finite-data approximation of the limit directions `P(Λ)`.
///
/// With a tail model the answer is the tail direction, exactly: a finite
/// prefix has no accumulation points. Otherwise each direction `λ/|λ|` of a
/// value with `|λ| > radius` is thickened to an arc of width `cluster_tol`
/// and overlapping arcs are merged. `radius = None` uses
/// [`default_radius`].
pub fn limit_directions(
    seq: &ExponentSequence,
    radius: Option<f64>,
    cluster_tol: f64,
) -> Result<DirectionSet, ExponentError> {
    if let Some(t) = &seq.tail {
        return Ok(DirectionSet::point(t.direction));
    }
    let radius = match radius.or_else(|| default_radius(seq)) {
        Some(r) => r,
        None => return Err(ExponentError::NoTail { radius: 0.0 }),
    };
    let half = 0.5 * cluster_tol.max(0.0);
    let arcs: Vec<Arc> = seq
        .values
        .iter()
        .filter(|v| v.norm() > radius)
        .filter_map(|v| Direction::of(*v))
        .map(|d| Arc::new(d.angle() - half, d.angle() + half))
        .collect();
    if arcs.is_empty() {
        return Err(ExponentError::NoTail { radius });
    }
    Ok(DirectionSet::from_arcs(arcs))
}

/// Outcome of the growth-condition check.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GrowthEstimate {
    pub holds: bool,
    /// Estimate of `limsup Re v / ln|v|`.
    pub limsup: Extended,
}

/// [`check_condition8_with`] at [`DEFAULT_GROWTH_THRESHOLD`].
pub fn check_condition8(seq: &ExponentSequence) -> Result<GrowthEstimate, ExponentError> {
    check_condition8_with(seq, DEFAULT_GROWTH_THRESHOLD)
}

/// Estimates `limsup_j Re v_j / ln|v_j|` and decides whether it is infinite.
///
/// A ray tail inside the right half-plane decides the question exactly.
/// Otherwise the growth exponent `k` in `Re v ≈ (ln|v|)^k` is fitted on the
/// upper envelope of the far half of the prefix: `k > 1` means the ratio is
/// unbounded, `k < 1` means it tends to zero, and in between the largest
/// observed ratio is compared against `threshold`.
pub fn check_condition8_with(
    seq: &ExponentSequence,
    threshold: f64,
) -> Result<GrowthEstimate, ExponentError> {
    for v in &seq.values {
        if !(v.re > 0.0) {
            return Err(ExponentError::NonPositiveRealPart(*v));
        }
    }
    if let Some(t) = &seq.tail {
        let u = t.direction.unit();
        if !(u.re > 0.0) {
            return Err(ExponentError::NonPositiveRealPart(u));
        }
        return Ok(GrowthEstimate {
            holds: true,
            limsup: Extended::PosInf,
        });
    }

    let mut pts: Vec<Complex64> = seq.values.iter().copied().filter(|v| v.norm() > std::f64::consts::E).collect();
    pts.sort_by(|a, b| a.norm().total_cmp(&b.norm()));
    if pts.is_empty() {
        return Ok(GrowthEstimate {
            holds: false,
            limsup: Extended::Finite(0.0),
        });
    }
    let far = &pts[pts.len() / 2..];
    let ratio = |v: &Complex64| v.re / v.norm().ln();
    let observed = far.iter().map(ratio).fold(0.0, f64::max);

    let mut qs: Vec<f64> = far.iter().map(ratio).collect();
    qs.sort_by(f64::total_cmp);
    let median = qs[qs.len() / 2];
    let envelope: Vec<(f64, f64)> = far
        .iter()
        .filter(|v| ratio(v) >= median)
        .map(|v| (v.norm().ln().ln(), v.re.ln()))
        .collect();

    let fallback = GrowthEstimate {
        holds: observed > threshold,
        limsup: Extended::Finite(observed),
    };
    let Some(k) = slope(&envelope) else {
        return Ok(fallback);
    };
    Ok(if k > 1.1 {
        GrowthEstimate {
            holds: true,
            limsup: Extended::PosInf,
        }
    } else if k < 0.9 {
        GrowthEstimate {
            holds: false,
            limsup: Extended::Finite(0.0),
        }
    } else {
        fallback
    })
}

/// Least-squares slope, `None` when fewer than three points or no spread.
fn slope(pts: &[(f64, f64)]) -> Option<f64> {
    if pts.len() < 3 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 1e-12 * (1.0 + mx * mx)).then(|| sxy / sxx)
}

/// Greedy thinning to a subsequence inside `angle` with
/// `|λ_{n+1}| > 2|λ_n|`.
///
/// Values are scanned by increasing modulus, ties broken by closeness of
/// the argument to `β`; a value is kept when it lies in the angle and its
/// modulus strictly exceeds twice the last kept modulus. A tail ray inside
/// the angle is thinned to the ray with ratio `q^k`, `k` the least power
/// with `q^k > 2`, starting at the first ray term past the kept prefix.
pub fn thin_sequence(seq: &ExponentSequence, angle: &Angle) -> Result<ExponentSequence, ExponentError> {
    let tail_inside = seq
        .tail
        .as_ref()
        .filter(|t| angle.contains_angle(t.direction.angle()));
    let in_angle_count = seq
        .values
        .iter()
        .filter(|v| Direction::of(**v).is_some_and(|d| angle.contains_angle(d.angle())))
        .count();
    if tail_inside.is_none() && in_angle_count < 2 {
        return Err(ExponentError::NoExponentsInAngle);
    }

    let max_explicit = seq.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let mut scan: Vec<Complex64> = seq.values.clone();
    let mut next_tail = 0usize;
    if let Some(t) = &seq.tail {
        while t.modulus(next_tail) <= max_explicit {
            scan.push(t.term(next_tail));
            next_tail += 1;
        }
    }
    let closeness = |v: &Complex64| angular_distance(v.im.atan2(v.re), angle.beta);
    scan.sort_by(|a, b| match a.norm().total_cmp(&b.norm()) {
        Ordering::Equal => closeness(a).total_cmp(&closeness(b)),
        other => other,
    });

    let mut kept: Vec<Complex64> = Vec::new();
    let mut last = 0.0f64;
    for v in scan {
        let theta = v.im.atan2(v.re);
        if angle.contains_angle(theta) && (kept.is_empty() || v.norm() > 2.0 * last) {
            last = v.norm();
            kept.push(v);
        }
    }

    let tail = match tail_inside {
        Some(t) => {
            let mut n = next_tail;
            while !kept.is_empty() && t.modulus(n) <= 2.0 * last {
                n += 1;
            }
            let mut step = 1;
            while t.ratio.powi(step) <= 2.0 {
                step += 1;
            }
            Some(RayTail::new(
                t.direction.angle(),
                t.ratio.powi(step),
                t.modulus(n),
            )?)
        }
        None => None,
    };
    ExponentSequence::new(kept, tail)
}
