//! Finite sections of the multiple interpolation problem
//! `f^{(j)}(μ_k) = b_k^j`, `f = Σ c_n e^{λ_n z}`, and absolute convergence of
//! exponential series along a ray of exponents.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exponents::RayTail;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum InterpolationError {
    #[error("invalid node set: {0}")]
    InvalidNodes(String),
    #[error("invalid Hermite data: {0}")]
    InvalidData(String),
    #[error("size mismatch: {exponents} exponents for {conditions} conditions")]
    SizeMismatch { exponents: usize, conditions: usize },
    #[error("exponents {0} and {1} coincide")]
    DuplicateExponents(usize, usize),
    #[error("system is nearly singular: scaled pivot {pivot:.3e}, condition estimate {condition:.3e}")]
    NearSingular { pivot: f64, condition: f64 },
    #[error("unsupported coefficient model: {0}")]
    UnsupportedCoeffModel(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Node {
    pub mu: f64,
    #[serde(rename = "m")]
    pub multiplicity: usize,
}

impl Node {
    pub fn new(mu: f64, multiplicity: usize) -> Self {
        Self { mu, multiplicity }
    }
}

/// Real nodes with multiplicities, all on one side of their limit point.
#[derive(Clone, Debug, PartialEq)]
pub struct NodeSet {
    nodes: Vec<Node>,
    limit: f64,
}

impl NodeSet {
    pub fn new(nodes: Vec<Node>, limit: f64) -> Result<Self, InterpolationError> {
        let bad = |m: &str| Err(InterpolationError::InvalidNodes(m.into()));
        if nodes.is_empty() {
            return bad("no nodes");
        }
        if !limit.is_finite() || nodes.iter().any(|n| !n.mu.is_finite()) {
            return bad("nodes and limit point must be finite");
        }
        if nodes.iter().any(|n| n.multiplicity == 0) {
            return bad("multiplicities must be positive");
        }
        if nodes.windows(2).any(|w| !(w[0].mu < w[1].mu)) {
            return bad("nodes must be strictly increasing");
        }
        let below = nodes.iter().all(|n| n.mu < limit);
        let above = nodes.iter().all(|n| n.mu > limit);
        if !(below || above) {
            return bad("nodes must lie strictly on one side of the limit point");
        }
        Ok(Self { nodes, limit })
    }

    /// Simple nodes.
    pub fn simple(mus: &[f64], limit: f64) -> Result<Self, InterpolationError> {
        Self::new(mus.iter().map(|&mu| Node::new(mu, 1)).collect(), limit)
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn limit(&self) -> f64 {
        self.limit
    }

    /// `Σ m_k`.
    pub fn total_multiplicity(&self) -> usize {
        self.nodes.iter().map(|n| n.multiplicity).sum()
    }

    /// Condition indices `(k, j)` in row order.
    pub fn conditions(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.nodes
            .iter()
            .enumerate()
            .flat_map(|(k, n)| (0..n.multiplicity).map(move |j| (k, j)))
    }

    /// Same nodes shifted by `h`.
    pub fn translate(&self, h: f64) -> Self {
        Self {
            nodes: self.nodes.iter().map(|n| Node::new(n.mu + h, n.multiplicity)).collect(),
            limit: self.limit + h,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HermiteEntry {
    pub k: usize,
    pub j: usize,
    pub b: Complex64,
}

/// Prescribed values `b_k^j = f^{(j)}(μ_k)`.
#[derive(Clone, Debug, PartialEq)]
pub struct HermiteData {
    entries: Vec<HermiteEntry>,
}

impl HermiteData {
    pub fn new(entries: Vec<HermiteEntry>) -> Self {
        Self { entries }
    }

    /// Data listed in the row order of `nodes.conditions()`.
    pub fn from_values(nodes: &NodeSet, values: &[Complex64]) -> Result<Self, InterpolationError> {
        let n = nodes.total_multiplicity();
        if values.len() != n {
            return Err(InterpolationError::InvalidData(format!(
                "{} values for {n} conditions",
                values.len()
            )));
        }
        Ok(Self {
            entries: nodes
                .conditions()
                .zip(values)
                .map(|((k, j), &b)| HermiteEntry { k, j, b })
                .collect(),
        })
    }

    pub fn entries(&self) -> &[HermiteEntry] {
        &self.entries
    }

    /// Right-hand side in row order; each `(k, j)` with `j < m_k` must
    /// appear exactly once.
    pub fn rhs(&self, nodes: &NodeSet) -> Result<Vec<Complex64>, InterpolationError> {
        let mut offsets = Vec::with_capacity(nodes.nodes().len());
        let mut total = 0;
        for n in nodes.nodes() {
            offsets.push(total);
            total += n.multiplicity;
        }
        let mut out: Vec<Option<Complex64>> = vec![None; total];
        for e in &self.entries {
            let Some(node) = nodes.nodes().get(e.k) else {
                return Err(InterpolationError::InvalidData(format!("node index {} out of range", e.k)));
            };
            if e.j >= node.multiplicity {
                return Err(InterpolationError::InvalidData(format!(
                    "order {} at node {} exceeds multiplicity {}",
                    e.j, e.k, node.multiplicity
                )));
            }
            let slot = &mut out[offsets[e.k] + e.j];
            if slot.is_some() {
                return Err(InterpolationError::InvalidData(format!(
                    "duplicate entry for node {}, order {}",
                    e.k, e.j
                )));
            }
            *slot = Some(e.b);
        }
        out.into_iter()
            .enumerate()
            .map(|(i, b)| {
                b.ok_or_else(|| {
                    let (k, j) = nodes.conditions().nth(i).expect("row exists");
                    InterpolationError::InvalidData(format!("missing entry for node {k}, order {j}"))
                })
            })
            .collect()
    }
}

/// `f(z) = Σ c_n e^{λ_n z}`.
#[derive(Clone, Debug, PartialEq)]
pub struct ExpSum {
    exponents: Vec<Complex64>,
    coefficients: Vec<Complex64>,
}

impl ExpSum {
    pub fn new(exponents: Vec<Complex64>, coefficients: Vec<Complex64>) -> Result<Self, InterpolationError> {
        if exponents.len() != coefficients.len() {
            return Err(InterpolationError::SizeMismatch {
                exponents: exponents.len(),
                conditions: coefficients.len(),
            });
        }
        check_distinct(&exponents)?;
        Ok(Self {
            exponents,
            coefficients,
        })
    }

    pub fn exponents(&self) -> &[Complex64] {
        &self.exponents
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coefficients
    }
}

fn check_distinct(exponents: &[Complex64]) -> Result<(), InterpolationError> {
    for (i, a) in exponents.iter().enumerate() {
        if let Some(j) = exponents[i + 1..].iter().position(|b| b == a) {
            return Err(InterpolationError::DuplicateExponents(i, i + 1 + j));
        }
    }
    Ok(())
}

/// `f^{(order)}(z) = Σ c_n λ_n^order e^{λ_n z}`.
pub fn eval_expsum(f: &ExpSum, z: Complex64, order: u32) -> Complex64 {
    f.exponents
        .iter()
        .zip(&f.coefficients)
        .map(|(&l, &c)| c * l.powu(order) * (l * z).exp())
        .sum()
}

/// Rows `(k, j)`, columns `n`: `λ_n^j e^{λ_n (μ_k − shift)}`, for any
/// number of exponents.
fn collocation(exponents: &[Complex64], nodes: &NodeSet, shift: f64) -> DMatrix<Complex64> {
    let rows: Vec<(usize, usize)> = nodes.conditions().collect();
    DMatrix::from_fn(rows.len(), exponents.len(), |r, n| {
        let (k, j) = rows[r];
        let l = exponents[n];
        l.powu(j as u32) * (l * (nodes.nodes()[k].mu - shift)).exp()
    })
}

/// The confluent matrix with row `(k, j)` and column `n` equal to
/// `λ_n^j e^{λ_n μ_k}`, without requiring it to be square.
pub fn collocation_matrix(exponents: &[Complex64], nodes: &NodeSet) -> DMatrix<Complex64> {
    collocation(exponents, nodes, 0.0)
}

/// Square confluent Vandermonde-type matrix `λ_n^j e^{λ_n μ_k}`.
pub fn hermite_matrix(exponents: &[Complex64], nodes: &NodeSet) -> Result<DMatrix<Complex64>, InterpolationError> {
    check_square(exponents, nodes)?;
    Ok(collocation(exponents, nodes, 0.0))
}

fn check_square(exponents: &[Complex64], nodes: &NodeSet) -> Result<(), InterpolationError> {
    let conditions = nodes.total_multiplicity();
    if exponents.len() != conditions {
        return Err(InterpolationError::SizeMismatch {
            exponents: exponents.len(),
            conditions,
        });
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolveOptions {
    /// Smallest admissible pivot relative to the largest entry of the
    /// scaled matrix.
    pub pivot_tol: f64,
    /// Divide column `n` by `e^{λ_n μ_ref}`, `μ_ref` the median node.
    pub scale_columns: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            pivot_tol: 1e-14,
            scale_columns: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Solution {
    pub sum: ExpSum,
    /// `max |f^{(j)}(μ_k) − b_k^j|`.
    pub residual: f64,
    /// `residual / max |b_k^j|` (absolute when all data vanish).
    pub relative_residual: f64,
    /// Ratio of the largest to the smallest pivot.
    pub condition_estimate: f64,
    /// Smallest pivot relative to the largest entry of the scaled matrix.
    pub min_pivot: f64,
}

fn median_node(nodes: &NodeSet) -> f64 {
    let mus: Vec<f64> = nodes.nodes().iter().map(|n| n.mu).collect();
    let m = mus.len();
    if m % 2 == 1 {
        mus[m / 2]
    } else {
        0.5 * (mus[m / 2 - 1] + mus[m / 2])
    }
}

/// Solves the square finite section by full-pivot elimination on the
/// column-scaled matrix.
pub fn solve_finite_section(
    exponents: &[Complex64],
    nodes: &NodeSet,
    data: &HermiteData,
    options: &SolveOptions,
) -> Result<Solution, InterpolationError> {
    check_square(exponents, nodes)?;
    check_distinct(exponents)?;
    let b = data.rhs(nodes)?;
    let shift = if options.scale_columns { median_node(nodes) } else { 0.0 };
    let a = collocation(exponents, nodes, shift);
    let scale = a.iter().map(|x| x.norm()).fold(0.0, f64::max);
    let lu = a.clone().full_piv_lu();
    let pivots: Vec<f64> = lu.u().diagonal().iter().map(|p| p.norm()).collect();
    let largest = pivots.iter().copied().fold(0.0, f64::max);
    let smallest = pivots.iter().copied().fold(f64::INFINITY, f64::min);
    let min_pivot = if scale > 0.0 { smallest / scale } else { 0.0 };
    let condition = largest / smallest;
    if !(min_pivot >= options.pivot_tol) {
        return Err(InterpolationError::NearSingular {
            pivot: min_pivot,
            condition,
        });
    }
    let rhs = nalgebra::DVector::from_vec(b.clone());
    let y = lu.solve(&rhs).ok_or(InterpolationError::NearSingular {
        pivot: min_pivot,
        condition,
    })?;
    let coefficients: Vec<Complex64> = exponents
        .iter()
        .zip(y.iter())
        .map(|(&l, &yn)| yn * (-l * shift).exp())
        .collect();
    let sum = ExpSum::new(exponents.to_vec(), coefficients)?;
    let residual = nodes
        .conditions()
        .zip(&b)
        .map(|((k, j), &bk)| (eval_expsum(&sum, Complex64::new(nodes.nodes()[k].mu, 0.0), j as u32) - bk).norm())
        .fold(0.0, f64::max);
    let b_max = b.iter().map(|x| x.norm()).fold(0.0, f64::max);
    Ok(Solution {
        sum,
        residual,
        relative_residual: if b_max > 0.0 { residual / b_max } else { residual },
        condition_estimate: condition,
        min_pivot,
    })
}

/// Decay law for `|c_n|` along a ray of exponents `λ_n`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CoeffModel {
    /// `|c_n| = a·q^n`.
    Geometric { a: f64, q: f64 },
    /// `|c_n| = a·e^{−σ|λ_n|}`.
    ExpLinear { a: f64, sigma: f64 },
    /// `|c_n| = a·e^{−σ√|λ_n|}`.
    ExpSqrt { a: f64, sigma: f64 },
}

impl CoeffModel {
    fn validate(&self) -> Result<(), InterpolationError> {
        let (a, other, name) = match *self {
            CoeffModel::Geometric { a, q } => {
                if !(q > 0.0 && q.is_finite()) {
                    return Err(InterpolationError::UnsupportedCoeffModel(format!(
                        "geometric ratio must be positive, got {q}"
                    )));
                }
                (a, q, "q")
            }
            CoeffModel::ExpLinear { a, sigma } | CoeffModel::ExpSqrt { a, sigma } => (a, sigma, "sigma"),
        };
        if !(a > 0.0 && a.is_finite()) || !other.is_finite() {
            return Err(InterpolationError::UnsupportedCoeffModel(format!(
                "need finite a > 0 and finite {name}"
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Convergence {
    pub converges: bool,
    /// `lim (1/|λ_n|)·ln(|c_n| e^{Re λ_n z})`.
    pub margin: f64,
}

/// Absolute convergence of `Σ |c_n| e^{Re(λ_n z)}` for exponents on the ray
/// `tail` and coefficients following `model`.
///
/// With `λ_n = a r^n s`, the terms are `exp(|λ_n|·(Re(sz) + o(1)))` for the
/// sub-exponential laws and `exp(|λ_n|·(Re(sz) − σ))` for the linear one,
/// so the sign of the margin decides; a zero margin is settled by the
/// remaining factor.
pub fn abs_convergence_margin(tail: &RayTail, model: &CoeffModel, z: Complex64) -> Result<Convergence, InterpolationError> {
    model.validate()?;
    let along = (tail.direction().unit() * z).re;
    let margin = match *model {
        CoeffModel::ExpLinear { sigma, .. } => along - sigma,
        _ => along,
    };
    let converges = if margin != 0.0 {
        margin < 0.0
    } else {
        match *model {
            CoeffModel::Geometric { q, .. } => q < 1.0,
            CoeffModel::ExpLinear { .. } => false,
            CoeffModel::ExpSqrt { sigma, .. } => sigma > 0.0,
        }
    };
    Ok(Convergence { converges, margin })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::E;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn matrix_examples() {
        let one = NodeSet::simple(&[-1.0], 0.0).unwrap();
        let m = hermite_matrix(&[c(1.0)], &one).unwrap();
        assert_eq!(m[(0, 0)], c((-1.0f64).exp()));

        let double = NodeSet::new(vec![Node::new(-1.0, 2)], 0.0).unwrap();
        let m = hermite_matrix(&[c(1.0), c(2.0)], &double).unwrap();
        let (e1, e2) = ((-1.0f64).exp(), (-2.0f64).exp());
        assert_eq!(m, DMatrix::from_row_slice(2, 2, &[c(e1), c(e2), c(e1), c(2.0 * e2)]));

        let two = NodeSet::simple(&[-2.0, -1.0], 0.0).unwrap();
        let m = hermite_matrix(&[c(1.0), c(2.0)], &two).unwrap();
        // rows ordered by increasing node
        assert_eq!(m, DMatrix::from_row_slice(2, 2, &[c(e2), c((-4.0f64).exp()), c(e1), c(e2)]));

        assert!(matches!(
            hermite_matrix(&[c(1.0)], &two),
            Err(InterpolationError::SizeMismatch { .. })
        ));
    }

    #[test]
    fn solve_examples() {
        let one = NodeSet::simple(&[-1.0], 0.0).unwrap();
        let data = HermiteData::from_values(&one, &[c(5.0)]).unwrap();
        let s = solve_finite_section(&[c(1.0)], &one, &data, &SolveOptions::default()).unwrap();
        assert!((s.sum.coefficients()[0] - c(5.0 * E)).norm() < 1e-12);

        let double = NodeSet::new(vec![Node::new(-1.0, 2)], 0.0).unwrap();
        let data = HermiteData::from_values(&double, &[c(0.0), c(1.0)]).unwrap();
        let s = solve_finite_section(&[c(1.0), c(2.0)], &double, &data, &SolveOptions::default()).unwrap();
        assert!((s.sum.coefficients()[0] - c(-E)).norm() < 1e-12);
        assert!((s.sum.coefficients()[1] - c(E * E)).norm() < 1e-12);
        assert!((eval_expsum(&s.sum, c(-1.0), 1) - c(1.0)).norm() < 1e-12);
        assert!(eval_expsum(&s.sum, c(-1.0), 0).norm() < 1e-12);
    }

    #[test]
    fn two_simple_nodes_against_cramer() {
        let two = NodeSet::simple(&[-2.0, -1.0], 0.0).unwrap();
        // f(−2) = 0, f(−1) = 1
        let data = HermiteData::from_values(&two, &[c(0.0), c(1.0)]).unwrap();
        let s = solve_finite_section(&[c(1.0), c(2.0)], &two, &data, &SolveOptions::default()).unwrap();
        let (a, b, cc, d) = ((-2.0f64).exp(), (-4.0f64).exp(), (-1.0f64).exp(), (-2.0f64).exp());
        let det = a * d - b * cc;
        let expect = [-b / det, a / det];
        for (got, want) in s.sum.coefficients().iter().zip(expect) {
            assert!((got - c(want)).norm() <= 1e-12 * want.abs(), "{got} vs {want}");
        }
    }

    #[test]
    fn rejects_bad_input() {
        let two = NodeSet::simple(&[-2.0, -1.0], 0.0).unwrap();
        let data = HermiteData::from_values(&two, &[c(1.0), c(1.0)]).unwrap();
        assert_eq!(
            solve_finite_section(&[c(1.0), c(1.0)], &two, &data, &SolveOptions::default()),
            Err(InterpolationError::DuplicateExponents(0, 1))
        );
        assert!(matches!(
            solve_finite_section(&[c(1.0), c(1.0 + 1e-15)], &two, &data, &SolveOptions::default()),
            Err(InterpolationError::NearSingular { .. })
        ));
        let partial = HermiteData::new(vec![HermiteEntry { k: 0, j: 0, b: c(1.0) }]);
        assert!(matches!(partial.rhs(&two), Err(InterpolationError::InvalidData(_))));
        assert!(NodeSet::simple(&[-1.0, 1.0], 0.0).is_err());
        assert!(NodeSet::simple(&[-1.0, -2.0], 0.0).is_err());
        assert!(NodeSet::new(vec![Node::new(-1.0, 0)], 0.0).is_err());
    }

    #[test]
    fn evaluation_examples() {
        let f = ExpSum::new(vec![c(1.0)], vec![c(1.0)]).unwrap();
        assert_eq!(eval_expsum(&f, c(0.0), 0), c(1.0));
        assert_eq!(eval_expsum(&f, c(0.0), 3), c(1.0));
        assert!(ExpSum::new(vec![c(1.0), c(1.0)], vec![c(1.0), c(2.0)]).is_err());
    }

    #[test]
    fn convergence_examples() {
        let ray = RayTail::new(0.0, 2.0, 2.0).unwrap();
        let unit = CoeffModel::Geometric { a: 1.0, q: 1.0 };
        let r = abs_convergence_margin(&ray, &unit, c(-0.1)).unwrap();
        assert_eq!(r, Convergence { converges: true, margin: -0.1 });
        let r = abs_convergence_margin(&ray, &unit, c(0.1)).unwrap();
        assert_eq!(r, Convergence { converges: false, margin: 0.1 });
        let r = abs_convergence_margin(&ray, &unit, Complex64::new(0.0, 1.0)).unwrap();
        assert_eq!(r, Convergence { converges: false, margin: 0.0 });
        let lin = CoeffModel::ExpLinear { a: 1.0, sigma: 0.5 };
        assert!(abs_convergence_margin(&ray, &lin, c(0.4)).unwrap().converges);
        assert!(!abs_convergence_margin(&ray, &lin, c(0.5)).unwrap().converges);
        assert!(abs_convergence_margin(&ray, &CoeffModel::Geometric { a: 0.0, q: 1.0 }, c(0.0)).is_err());
    }
}
