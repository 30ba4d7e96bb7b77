//! Exponential polynomials `p(z) = Σ a_k(z)·e^{ω_k z}` with real increasing
//! frequencies: evaluation, sampled lower bounds in sectors, zero-free radii
//! by the argument principle, and membership in the Hermite kernel.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::exponents::Angle;
use crate::interpolation::NodeSet;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExpPolyError {
    #[error("invalid exponential polynomial: {0}")]
    Invalid(String),
    #[error("top frequency {0} is not negative")]
    NonNegativeTopFrequency(f64),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

/// One summand `a(z)·e^{ωz}`; `coeffs` in ascending degree.
#[derive(Clone, Debug, PartialEq)]
pub struct ExpTerm {
    pub omega: f64,
    pub coeffs: Vec<Complex64>,
}

impl ExpTerm {
    pub fn new(omega: f64, coeffs: Vec<Complex64>) -> Self {
        Self { omega, coeffs }
    }

    fn poly(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    /// Degree after trimming; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|c| c.norm() != 0.0)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExpPolynomial {
    terms: Vec<ExpTerm>,
}

impl ExpPolynomial {
    /// Frequencies must be finite and strictly increasing; the first and
    /// last coefficient polynomials must not vanish identically. Trailing
    /// zero coefficients are trimmed.
    pub fn new(terms: Vec<ExpTerm>) -> Result<Self, ExpPolyError> {
        if terms.is_empty() {
            return Err(ExpPolyError::Invalid("no terms".into()));
        }
        let mut terms = terms;
        for t in &mut terms {
            if !t.omega.is_finite() {
                return Err(ExpPolyError::Invalid("frequencies must be finite".into()));
            }
            if t.coeffs.iter().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
                return Err(ExpPolyError::Invalid("coefficients must be finite".into()));
            }
            let keep = t.degree().map_or(0, |d| d + 1);
            t.coeffs.truncate(keep);
        }
        if terms.windows(2).any(|w| !(w[0].omega < w[1].omega)) {
            return Err(ExpPolyError::Invalid(
                "frequencies must be strictly increasing".into(),
            ));
        }
        let first = &terms[0];
        let last = &terms[terms.len() - 1];
        if first.degree().is_none() || last.degree().is_none() {
            return Err(ExpPolyError::Invalid(
                "lowest and highest frequency terms must be nonzero".into(),
            ));
        }
        Ok(Self { terms })
    }

    pub fn terms(&self) -> &[ExpTerm] {
        &self.terms
    }

    /// `ω_s`, the largest frequency.
    pub fn top_frequency(&self) -> f64 {
        self.terms[self.terms.len() - 1].omega
    }

    /// `ω_0`, the smallest frequency.
    pub fn bottom_frequency(&self) -> f64 {
        self.terms[0].omega
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.terms
            .iter()
            .map(|t| t.poly(z) * (t.omega * z).exp())
            .sum()
    }

    /// `p(z)·e^{−shift·z}`, evaluated term by term so that the dominant
    /// exponential never over- or underflows.
    pub fn eval_shifted(&self, z: Complex64, shift: f64) -> Complex64 {
        self.terms
            .iter()
            .map(|t| t.poly(z) * ((t.omega - shift) * z).exp())
            .sum()
    }

    /// `Σ |a_k(z)·e^{(ω_k − shift)z}|`: the size against which cancellation
    /// in [`eval_shifted`](Self::eval_shifted) is judged.
    fn shifted_magnitude(&self, z: Complex64, shift: f64) -> f64 {
        self.terms
            .iter()
            .map(|t| (t.poly(z) * ((t.omega - shift) * z).exp()).norm())
            .sum()
    }

    fn require_negative_top(&self) -> Result<f64, ExpPolyError> {
        let top = self.top_frequency();
        if top < 0.0 {
            Ok(top)
        } else {
            Err(ExpPolyError::NonNegativeTopFrequency(top))
        }
    }
}

/// `p(z) = Σ a_k(z) e^{ω_k z}`.
pub fn eval_p(p: &ExpPolynomial, z: Complex64) -> Complex64 {
    p.eval(z)
}

/// Deterministic sampling lattice on sector annuli `r < |z| ≤ 8r`.
///
/// Radii are `r·8^{(i + offset)/n}` for `i = 0..n`, angles evenly spaced
/// across the sector with both edges included. The seed only moves the
/// radial offset within `(0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Lattice {
    radial_offset: f64,
}

impl Default for Lattice {
    fn default() -> Self {
        Self { radial_offset: 1.0 }
    }
}

impl Lattice {
    pub fn from_seed(seed: Option<u64>) -> Self {
        match seed {
            None => Self::default(),
            Some(s) => {
                let u: f64 = ChaCha8Rng::seed_from_u64(s).gen_range(0.0..1.0);
                Self {
                    radial_offset: 1.0 - u,
                }
            }
        }
    }

    /// Points of the annular sector `{β−α ≤ arg z ≤ β+α, r < |z| ≤ 8r}`.
    pub fn sector_points(&self, beta: f64, alpha: f64, r: f64, n: usize) -> Vec<Complex64> {
        let n = n.max(1);
        let angles: Vec<f64> = if alpha == 0.0 || n == 1 {
            vec![beta]
        } else {
            (0..n)
                .map(|j| beta - alpha + 2.0 * alpha * j as f64 / (n - 1) as f64)
                .collect()
        };
        let mut pts = Vec::with_capacity(n * angles.len());
        for i in 0..n {
            let rho = r * 8f64.powf((i as f64 + self.radial_offset) / n as f64);
            for &a in &angles {
                pts.push(Complex64::from_polar(rho, a));
            }
        }
        pts
    }
}

/// Result of a sampled lower-bound check.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundCheck {
    /// Every sampled ratio is positive.
    pub ok: bool,
    pub worst_ratio: f64,
    /// Largest constant for which the bound holds on the samples.
    pub c_estimate: f64,
    pub samples: usize,
}

fn min_ratio(points: &[Complex64], ratio: impl Fn(Complex64) -> f64 + Sync) -> BoundCheck {
    let worst = points
        .par_iter()
        .map(|&z| ratio(z))
        .reduce(|| f64::INFINITY, f64::min);
    BoundCheck {
        ok: worst > 0.0,
        worst_ratio: worst,
        c_estimate: worst,
        samples: points.len(),
    }
}

fn check_radius(r: f64) -> Result<(), ExpPolyError> {
    if r.is_finite() && r > 0.0 {
        Ok(())
    } else {
        Err(ExpPolyError::InvalidArgument(format!("radius must be positive, got {r}")))
    }
}

/// Samples `ratio(z) = |p(z)|·e^{−ω_s κ|z|}` over the sector annulus
/// `r < |z| ≤ 8r` of `angle` (an `samples × samples` lattice) and reports
/// the smallest ratio. `κ = cos(max(|β| − α, 0))` is the largest `cos arg z`
/// on the angle, so `e^{ω_s κ|z|} ≤ e^{ω_s Re z}` there and a positive
/// minimum is a lower bound `|p(z)| ≥ c·e^{ω_s κ|z|}`.
pub fn verify_sector_bound(
    p: &ExpPolynomial,
    angle: &Angle,
    r: f64,
    samples: usize,
    lattice: &Lattice,
) -> Result<BoundCheck, ExpPolyError> {
    let top = p.require_negative_top()?;
    check_radius(r)?;
    let c = angle.max_cos();
    let pts = lattice.sector_points(angle.beta(), angle.alpha(), r, samples);
    Ok(min_ratio(&pts, |z| {
        // |p(z)| = |p(z)e^{−ω_s z}|·e^{ω_s Re z}
        let log = p.eval_shifted(z, top).norm().ln() + top * (z.re - c * z.norm());
        log.exp()
    }))
}

/// Companion check on the left: samples `|p(z)|·e^{−ω_0 Re z}` over the
/// mirrored annulus `{−w : w in the sector, r < |w| ≤ 8r}`.
pub fn verify_left_bound(
    p: &ExpPolynomial,
    angle: &Angle,
    r: f64,
    samples: usize,
    lattice: &Lattice,
) -> Result<BoundCheck, ExpPolyError> {
    check_radius(r)?;
    let bottom = p.bottom_frequency();
    let pts: Vec<Complex64> = lattice
        .sector_points(angle.beta(), angle.alpha(), r, samples)
        .into_iter()
        .map(|w| -w)
        .collect();
    Ok(min_ratio(&pts, |z| p.eval_shifted(z, bottom).norm()))
}

/// Options for [`zero_free_radius`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ZeroFreeOptions {
    /// Halvings of `r_max` tried before stopping at the sampling floor.
    pub halvings: u32,
}

impl Default for ZeroFreeOptions {
    fn default() -> Self {
        Self { halvings: 20 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ZeroFreeRadius {
    pub radius: f64,
    /// `false` when `p` could not be shown zero-free beyond `r_max`.
    pub certified: bool,
}

/// Smallest sampled radius `r ≤ r_max` such that `p` has no zeros in the
/// sector beyond `r`.
///
/// The region `|z| > r_max` is cleared analytically: the top term must
/// dominate the others there. Radii `r_max/2^k` are then tried inward,
/// counting zeros of each annular sector by the argument principle; the scan
/// stops at the first annulus with a zero, or whose count is not stable.
pub fn zero_free_radius(
    p: &ExpPolynomial,
    angle: &Angle,
    r_max: f64,
    options: &ZeroFreeOptions,
) -> Result<ZeroFreeRadius, ExpPolyError> {
    let top = p.require_negative_top()?;
    check_radius(r_max)?;
    if !dominates_beyond(p, angle, r_max) {
        return Ok(ZeroFreeRadius {
            radius: r_max,
            certified: false,
        });
    }
    // A degenerate sector still has to enclose its ray.
    let alpha = angle.alpha().max(1e-6);
    let (lo, hi) = (angle.beta() - alpha, angle.beta() + alpha);
    let mut outer = r_max;
    for _ in 0..options.halvings {
        let inner = 0.5 * outer;
        match count_zeros_in_sector(p, top, lo, hi, inner, outer) {
            Some(0) => outer = inner,
            _ => break,
        }
    }
    Ok(ZeroFreeRadius {
        radius: outer,
        certified: true,
    })
}

/// Whether `|a_s(z)| > Σ_{k<s} |a_k(z)|·|e^{(ω_k − ω_s)z}|` for every `z` in
/// the sector with `|z| ≥ t0`. Uses `Re z ≥ cos(|β|+α)|z|` there and bounds
/// each `t^m e^{−γt}` by its supremum over `t ≥ t0`.
fn dominates_beyond(p: &ExpPolynomial, angle: &Angle, t0: f64) -> bool {
    let c = angle.min_cos();
    let terms = p.terms();
    let top = &terms[terms.len() - 1];
    let d = top.degree().expect("top term is nonzero");
    let lead = top.coeffs[d].norm();
    let lower: f64 = lead
        - top.coeffs[..d]
            .iter()
            .enumerate()
            .map(|(j, a)| a.norm() * t0.powi(j as i32 - d as i32))
            .sum::<f64>();
    if !(lower > 0.0) {
        return false;
    }
    let mut upper = 0.0;
    for t in &terms[..terms.len() - 1] {
        let gamma = (top.omega - t.omega) * c;
        for (j, a) in t.coeffs.iter().enumerate() {
            if a.norm() == 0.0 {
                continue;
            }
            let m = j as f64 - d as f64;
            let at = if m > 0.0 { t0.max(m / gamma) } else { t0 };
            upper += a.norm() * (m * at.ln() - gamma * at).exp();
        }
    }
    lower > upper
}

/// Number of zeros of `p` in `{lo ≤ arg z ≤ hi, inner ≤ |z| ≤ outer}`, or
/// `None` when a zero sits on the contour or two resolutions disagree.
fn count_zeros_in_sector(
    p: &ExpPolynomial,
    shift: f64,
    lo: f64,
    hi: f64,
    inner: f64,
    outer: f64,
) -> Option<i64> {
    let contour = |t: f64| -> Complex64 {
        // Four unit-length legs: outer arc ccw, edge inward, inner arc cw,
        // edge outward.
        let (leg, s) = ((t.floor() as i64).clamp(0, 3), t - t.floor().clamp(0.0, 3.0));
        match leg {
            0 => Complex64::from_polar(outer, lo + (hi - lo) * s),
            1 => Complex64::from_polar(outer + (inner - outer) * s, hi),
            2 => Complex64::from_polar(inner, hi + (lo - hi) * s),
            _ => Complex64::from_polar(inner + (outer - inner) * s, lo),
        }
    };
    let f = |z: Complex64| -> Option<Complex64> {
        let v = p.eval_shifted(z, shift);
        let size = p.shifted_magnitude(z, shift);
        (v.norm() > 1e-12 * size && v.norm().is_finite()).then_some(v)
    };
    let coarse = winding_number(&contour, &f, 4.0, 6, std::f64::consts::FRAC_PI_4)?;
    let fine = winding_number(&contour, &f, 4.0, 8, std::f64::consts::FRAC_PI_8)?;
    (coarse == fine).then_some(fine)
}

/// Winding number of `f ∘ contour` around 0 for `t ∈ [0, length]`, by
/// adaptive subdivision until every step turns by less than `max_turn`.
fn winding_number(
    contour: &impl Fn(f64) -> Complex64,
    f: &impl Fn(Complex64) -> Option<Complex64>,
    length: f64,
    min_depth: u32,
    max_turn: f64,
) -> Option<i64> {
    const MAX_DEPTH: u32 = 40;
    fn walk(
        contour: &impl Fn(f64) -> Complex64,
        f: &impl Fn(Complex64) -> Option<Complex64>,
        (t0, f0): (f64, Complex64),
        (t1, f1): (f64, Complex64),
        depth: u32,
        min_depth: u32,
        max_turn: f64,
    ) -> Option<f64> {
        let turn = (f1 / f0).arg();
        if depth >= min_depth && turn.abs() < max_turn {
            return Some(turn);
        }
        if depth >= MAX_DEPTH {
            return None;
        }
        let tm = 0.5 * (t0 + t1);
        let fm = f(contour(tm))?;
        let a = walk(contour, f, (t0, f0), (tm, fm), depth + 1, min_depth, max_turn)?;
        let b = walk(contour, f, (tm, fm), (t1, f1), depth + 1, min_depth, max_turn)?;
        Some(a + b)
    }
    let pieces = 4usize;
    let mut total = 0.0;
    for k in 0..pieces {
        let t0 = length * k as f64 / pieces as f64;
        let t1 = length * (k + 1) as f64 / pieces as f64;
        let f0 = f(contour(t0))?;
        let f1 = f(contour(if k + 1 == pieces { 0.0 } else { t1 }))?;
        total += walk(contour, f, (t0, f0), (t1, f1), 0, min_depth, max_turn)?;
    }
    let turns = total / TAU;
    let rounded = turns.round();
    ((turns - rounded).abs() < 0.1).then_some(rounded as i64)
}

/// Whether `p` has the shape of an element of the Hermite kernel for
/// `nodes`: every frequency is a node `μ_k` and its coefficient polynomial
/// has degree below `m_k`.
pub fn hermite_membership(p: &ExpPolynomial, nodes: &NodeSet) -> bool {
    p.terms().iter().all(|t| {
        let Some(deg) = t.degree() else {
            return true;
        };
        nodes
            .nodes()
            .iter()
            .any(|n| n.mu == t.omega && deg < n.multiplicity)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cx(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn single(omega: f64, coeffs: &[f64]) -> ExpPolynomial {
        ExpPolynomial::new(vec![ExpTerm::new(omega, coeffs.iter().map(|&c| cx(c)).collect())]).unwrap()
    }

    fn pair(c_low: f64, c_high: f64) -> ExpPolynomial {
        // c_low·e^{−2z} + c_high·e^{−z}
        ExpPolynomial::new(vec![
            ExpTerm::new(-2.0, vec![cx(c_low)]),
            ExpTerm::new(-1.0, vec![cx(c_high)]),
        ])
        .unwrap()
    }

    #[test]
    fn evaluation_examples() {
        assert_eq!(single(-1.0, &[1.0]).eval(cx(0.0)), cx(1.0));
        assert_eq!(pair(-1.0, 1.0).eval(cx(0.0)), cx(0.0));
        let v = single(-1.0, &[0.0, 1.0]).eval(cx(1.0));
        assert!((v - cx((-1.0f64).exp())).norm() < 1e-16);
    }

    #[test]
    fn construction_rules() {
        assert!(ExpPolynomial::new(vec![]).is_err());
        assert!(ExpPolynomial::new(vec![
            ExpTerm::new(-1.0, vec![cx(1.0)]),
            ExpTerm::new(-1.0, vec![cx(1.0)]),
        ])
        .is_err());
        assert!(ExpPolynomial::new(vec![ExpTerm::new(-1.0, vec![cx(0.0)])]).is_err());
        let p = single(-1.0, &[1.0, 0.0, 0.0]);
        assert_eq!(p.terms()[0].coeffs.len(), 1);
    }

    #[test]
    fn sector_bound_for_a_single_exponential() {
        let p = single(-1.0, &[1.0]);
        let a = Angle::new(0.0, 0.1).unwrap();
        let b = verify_sector_bound(&p, &a, 1.0, 33, &Lattice::default()).unwrap();
        assert!(b.ok);
        // ratio = e^{|z|(1 − cos φ)}: 1 on the ray φ = 0, larger elsewhere.
        assert!((b.c_estimate - 1.0).abs() < 1e-12, "{}", b.c_estimate);
        let off = verify_sector_bound(&p, &Angle::new(0.5, 0.1).unwrap(), 1.0, 33, &Lattice::default()).unwrap();
        // ratio = e^{|z|(cos 0.4 − cos φ)}: 1 on the edge nearer the axis.
        assert!((off.c_estimate - 1.0).abs() < 1e-12, "{}", off.c_estimate);
    }

    #[test]
    fn sector_bound_needs_negative_top_frequency() {
        let p = pair(1.0, 1.0);
        let q = ExpPolynomial::new(vec![
            ExpTerm::new(-1.0, vec![cx(1.0)]),
            ExpTerm::new(0.0, vec![cx(1.0)]),
        ])
        .unwrap();
        let a = Angle::new(0.0, 0.1).unwrap();
        assert!(verify_sector_bound(&p, &a, 1.0, 8, &Lattice::default()).is_ok());
        assert_eq!(
            verify_sector_bound(&q, &a, 1.0, 8, &Lattice::default()),
            Err(ExpPolyError::NonNegativeTopFrequency(0.0))
        );
        assert!(zero_free_radius(&q, &a, 10.0, &ZeroFreeOptions::default()).is_err());
    }

    #[test]
    fn zero_free_radius_of_zero_free_functions_is_the_floor() {
        let a = Angle::new(0.0, 0.3).unwrap();
        let opts = ZeroFreeOptions::default();
        let floor = 16.0 / 2f64.powi(opts.halvings as i32);
        let r = zero_free_radius(&single(-1.0, &[1.0]), &a, 16.0, &opts).unwrap();
        assert_eq!(r, ZeroFreeRadius { radius: floor, certified: true });
        // e^{−z} − e^{−2z} vanishes only on the imaginary axis.
        let r = zero_free_radius(&pair(-1.0, 1.0), &a, 16.0, &opts).unwrap();
        assert_eq!(r, ZeroFreeRadius { radius: floor, certified: true });
    }

    #[test]
    fn zero_inside_the_sector_is_found() {
        // e^{−z} − e^5·e^{−2z} vanishes at z = 5 + 2πik; z = 5 is in the sector.
        let p = pair(-(5.0f64).exp(), 1.0);
        let a = Angle::new(0.0, 0.2).unwrap();
        let r = zero_free_radius(&p, &a, 16.0, &ZeroFreeOptions::default()).unwrap();
        assert_eq!(r, ZeroFreeRadius { radius: 8.0, certified: true });
        // Below the zero the tail cannot be cleared.
        let r = zero_free_radius(&p, &a, 4.0, &ZeroFreeOptions::default()).unwrap();
        assert_eq!(r, ZeroFreeRadius { radius: 4.0, certified: false });
    }

    #[test]
    fn argument_principle_counts_known_zeros() {
        // (z − 3)(z − 4)·e^{−z} has two zeros in the annulus 2 ≤ |z| ≤ 5.
        let p = ExpPolynomial::new(vec![ExpTerm::new(-1.0, vec![cx(12.0), cx(-7.0), cx(1.0)])]).unwrap();
        assert_eq!(count_zeros_in_sector(&p, -1.0, -0.2, 0.2, 2.0, 5.0), Some(2));
        assert_eq!(count_zeros_in_sector(&p, -1.0, -0.2, 0.2, 3.5, 5.0), Some(1));
        assert_eq!(count_zeros_in_sector(&p, -1.0, 0.1, 0.2, 2.0, 5.0), Some(0));
        // A zero on the contour is not certified.
        assert_eq!(count_zeros_in_sector(&p, -1.0, -0.2, 0.2, 3.0, 5.0), None);
    }

    #[test]
    fn left_bound_on_the_mirrored_sector() {
        let p = pair(2.0, 1.0);
        let a = Angle::new(0.0, 0.2).unwrap();
        let b = verify_left_bound(&p, &a, 4.0, 16, &Lattice::default()).unwrap();
        assert!(b.ok);
        // |2 + e^{z}| ≥ 2 − e^{Re z} with Re z ≤ −4 cos 0.2
        assert!(b.c_estimate >= 2.0 - (-4.0 * 0.2f64.cos()).exp() - 1e-12);
    }

    #[test]
    fn seeded_lattices_are_reproducible() {
        let a = Lattice::from_seed(Some(7));
        let b = Lattice::from_seed(Some(7));
        assert_eq!(a, b);
        assert_ne!(a, Lattice::default());
        let pts = a.sector_points(0.0, 0.1, 1.0, 8);
        assert!(pts.iter().all(|z| z.norm() > 1.0 && z.norm() <= 8.0 + 1e-12));
    }

    #[test]
    fn membership_examples() {
        use crate::interpolation::{Node, NodeSet};
        let simple = NodeSet::new(vec![Node::new(-1.0, 1)], 0.0).unwrap();
        assert!(hermite_membership(&single(-1.0, &[1.0]), &simple));
        assert!(!hermite_membership(&single(-1.0, &[0.0, 1.0]), &simple));
        let two = NodeSet::new(vec![Node::new(-2.0, 1), Node::new(-1.0, 1)], 0.0).unwrap();
        assert!(!hermite_membership(&single(-3.0, &[1.0]), &two));
    }
}
