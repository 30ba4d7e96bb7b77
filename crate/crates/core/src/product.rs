//! Canonical product `G(z) = ∏ (1 − z/λ_n)` over geometrically separated
//! zeros, its derivative at the zeros, and the condensation index estimate.

use num_complex::Complex64;
use rayon::prelude::*;
use thiserror::Error;

use crate::exponents::{ExponentSequence, RayTail};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProductError {
    #[error("zeros are not separated: |λ_{next}| = {outer} < 2·{inner}")]
    NotSeparated { next: usize, inner: f64, outer: f64 },
    #[error("truncation {truncation} exceeds the {available} available zeros")]
    TruncationTooLarge { truncation: usize, available: usize },
    #[error("truncation must be at least 1")]
    EmptyTruncation,
    #[error("truncation too small: first omitted zero has modulus {omitted} ≤ 2|z| = {twice_z}")]
    TruncationTooSmall { omitted: f64, twice_z: f64 },
    #[error("zero index {index} outside 1..={truncation}")]
    IndexOutOfRange { index: usize, truncation: usize },
}

/// Value of the truncated product together with a bound on the omitted
/// factors: `|ln ∏_{n>N}(1 − z/λ_n)| ≤ tail_bound`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProductValue {
    pub value: Complex64,
    /// `ln|value|`, finite even where `value` itself over- or underflows;
    /// `-∞` at a zero.
    pub log_abs: f64,
    pub tail_bound: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CanonicalProduct {
    /// Retained zeros `λ_1, …, λ_N`, by increasing modulus.
    zeros: Vec<Complex64>,
    /// Known zeros past the truncation (explicit values and the ray terms
    /// materialised so far).
    omitted: Vec<Complex64>,
    /// Ray continuing past `omitted`, starting at term `tail_from`.
    tail: Option<(RayTail, usize)>,
}

impl CanonicalProduct {
    /// Product over the first `truncation` zeros of `seq`, which must satisfy
    /// `|λ_{n+1}| ≥ 2|λ_n|` throughout. Thinned sequences satisfy the strict
    /// form; the closed form also admits the exact powers of two.
    pub fn new(seq: &ExponentSequence, truncation: usize) -> Result<Self, ProductError> {
        if truncation == 0 {
            return Err(ProductError::EmptyTruncation);
        }
        let n_tail = truncation + 1;
        let all = seq.materialize(n_tail);
        if let Some(t) = seq.tail() {
            if t.ratio() < 2.0 {
                return Err(ProductError::NotSeparated {
                    next: all.len() + 1,
                    inner: t.modulus(n_tail - 1),
                    outer: t.modulus(n_tail),
                });
            }
        }
        for (i, w) in all.windows(2).enumerate() {
            let (inner, outer) = (w[0].norm(), w[1].norm());
            if !(outer >= 2.0 * inner) {
                return Err(ProductError::NotSeparated {
                    next: i + 2,
                    inner,
                    outer,
                });
            }
        }
        if truncation > all.len() {
            return Err(ProductError::TruncationTooLarge {
                truncation,
                available: all.len(),
            });
        }
        let (zeros, omitted) = all.split_at(truncation);
        Ok(Self {
            zeros: zeros.to_vec(),
            omitted: omitted.to_vec(),
            tail: seq.tail().map(|t| (*t, n_tail)),
        })
    }

    pub fn truncation(&self) -> usize {
        self.zeros.len()
    }

    pub fn zeros(&self) -> &[Complex64] {
        &self.zeros
    }

    /// Truncated product at `z` with a rigorous bound on the omitted factors.
    ///
    /// Uses `|ln(1 − w)| ≤ |w|/(1 − |w|)` per omitted factor; the ray part
    /// is summed in closed form using `|λ_{k}| ≥ a·q^k`. Needs the first
    /// omitted zero to exceed `2|z|`.
    pub fn eval(&self, z: Complex64) -> Result<ProductValue, ProductError> {
        let r = z.norm();
        if let Some(first) = self.omitted.first() {
            if first.norm() <= 2.0 * r {
                return Err(ProductError::TruncationTooSmall {
                    omitted: first.norm(),
                    twice_z: 2.0 * r,
                });
            }
        }
        if self.zeros.contains(&z) {
            return Ok(ProductValue {
                value: Complex64::new(0.0, 0.0),
                log_abs: f64::NEG_INFINITY,
                tail_bound: 0.0,
            });
        }
        let log: Complex64 = self.zeros.iter().map(|l| (1.0 - z / l).ln()).sum();
        let mut tail_bound: f64 = self.omitted.iter().map(|l| r / (l.norm() - r)).sum();
        if let Some((ray, from)) = &self.tail {
            let a = ray.modulus(*from);
            let q = ray.ratio();
            tail_bound += r / (a - r) * q / (q - 1.0);
        }
        Ok(ProductValue {
            value: log.exp(),
            log_abs: log.re,
            tail_bound,
        })
    }

    fn check_index(&self, n: usize) -> Result<(), ProductError> {
        if n == 0 || n > self.zeros.len() {
            return Err(ProductError::IndexOutOfRange {
                index: n,
                truncation: self.zeros.len(),
            });
        }
        Ok(())
    }

    /// `ln G′(λ_n)` of the truncated product (complex log; `n` is 1-based).
    fn log_derivative_at_zero(&self, n: usize) -> Complex64 {
        let ln = self.zeros[n - 1];
        let own = (-1.0 / ln).ln();
        own + self
            .zeros
            .iter()
            .enumerate()
            .filter(|(m, _)| *m != n - 1)
            .map(|(_, lm)| (1.0 - ln / lm).ln())
            .sum::<Complex64>()
    }

    /// `G′(λ_n) = −(1/λ_n) ∏_{m≠n, m≤N} (1 − λ_n/λ_m)`, `n` 1-based.
    pub fn derivative_at_zero(&self, n: usize) -> Result<Complex64, ProductError> {
        self.check_index(n)?;
        Ok(self.log_derivative_at_zero(n).exp())
    }

    /// Per-zero terms `(1/|λ_n|)·ln(1/|G′(λ_n)|)` for `n = 1..=upto`.
    pub fn condensation_profile(&self, upto: usize) -> Result<Vec<f64>, ProductError> {
        self.check_index(upto.max(1))?;
        Ok((1..=upto)
            .into_par_iter()
            .map(|n| -self.log_derivative_at_zero(n).re / self.zeros[n - 1].norm())
            .collect())
    }

    /// Estimate of the condensation index `δ = limsup (1/|λ_n|) ln(1/|G′(λ_n)|)`:
    /// the largest per-zero term over the far half `⌈upto/2⌉ ≤ n ≤ upto`,
    /// clamped below at 0.
    pub fn condensation_index(&self, upto: usize) -> Result<f64, ProductError> {
        let profile = self.condensation_profile(upto)?;
        let from = upto.div_ceil(2).max(1) - 1;
        Ok(profile[from..].iter().copied().fold(0.0, f64::max))
    }

    /// `max ln|G(z)| / R` over `samples` points of the circle `|z| = R`.
    pub fn growth_on_circle(&self, radius: f64, samples: usize) -> Result<f64, ProductError> {
        let values: Result<Vec<f64>, ProductError> = (0..samples.max(1))
            .into_par_iter()
            .map(|k| {
                let theta = std::f64::consts::TAU * (k as f64 + 0.5) / samples.max(1) as f64;
                self.eval(Complex64::from_polar(radius, theta)).map(|v| v.log_abs)
            })
            .collect();
        Ok(values?.into_iter().fold(f64::NEG_INFINITY, f64::max) / radius)
    }
}
