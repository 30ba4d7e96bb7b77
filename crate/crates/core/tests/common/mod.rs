#![allow(dead_code)]

use expseries::exponents::ExponentSequence;
use expseries::geometry::{ConvexDomain, Direction, Disc, HalfPlane};
use expseries::interpolation::NodeSet;
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;

/// A criterion instance whose contact arc at 0 is known by construction.
pub struct CriterionCase {
    pub domain: ConvexDomain,
    pub seq: ExponentSequence,
    pub nodes: NodeSet,
    /// Contact directions at 0: the arc spanned by the active normals.
    pub t_arc: (f64, f64),
    pub beta: f64,
    pub expect_solvable: bool,
}

/// Half-planes and at most one disc through 0, with normals in
/// `(−1.3, 1.3)` so that the negative real axis enters the domain, plus
/// inactive half-planes. The ray angle is chosen inside the contact arc or
/// at least 0.05 away from it.
pub fn criterion_case(rng: &mut impl Rng, overlap: bool) -> CriterionCase {
    let mut halfplanes = Vec::new();
    let mut discs = Vec::new();
    let mut normals = Vec::new();
    let active = rng.gen_range(1..=3);
    for _ in 0..active {
        let a: f64 = rng.gen_range(-1.3..1.3);
        normals.push(a);
        halfplanes.push(HalfPlane::new(Direction::new(a), 0.0));
    }
    if rng.gen_bool(0.4) {
        let a: f64 = rng.gen_range(-1.3..1.3);
        let r: f64 = rng.gen_range(0.5..3.0);
        normals.push(a);
        discs.push(Disc::new(-Complex64::from_polar(r, -a), r));
    }
    for _ in 0..rng.gen_range(0..=2) {
        let a: f64 = rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI);
        halfplanes.push(HalfPlane::new(Direction::new(a), rng.gen_range(0.5..2.0)));
    }
    let domain = ConvexDomain::new(halfplanes, discs).expect("constructed domain is nonempty");
    let lo = normals.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = normals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let beta = if overlap {
        if hi - lo < 1e-3 {
            normals[0]
        } else {
            rng.gen_range(lo..=hi)
        }
    } else {
        let gap: f64 = rng.gen_range(0.05..1.0);
        if rng.gen_bool(0.5) {
            hi + gap
        } else {
            lo - gap
        }
    };
    let mut x0 = 1.0;
    while !domain.contains(Complex64::new(-x0, 0.0)) {
        x0 *= 0.5;
    }
    let mus: Vec<f64> = (1..=10).map(|k| -x0 / k as f64).collect();
    CriterionCase {
        domain,
        seq: ExponentSequence::ray(beta, 2.0, 1.0).unwrap(),
        nodes: NodeSet::simple(&mus, 0.0).unwrap(),
        t_arc: (lo, hi),
        beta,
        expect_solvable: overlap,
    }
}

/// A bounded random domain: a convex polygon, a disc, or a polygon cut by
/// a disc.
pub fn bounded_domain(rng: &mut impl Rng) -> ConvexDomain {
    let center = Complex64::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
    let polygon = |rng: &mut dyn rand::RngCore| -> Vec<Complex64> {
        let n = 3 + (rng.next_u32() % 5) as usize;
        let mut angles: Vec<f64> = (0..n)
            .map(|_| rand::Rng::gen_range(rng, 0.0..std::f64::consts::TAU))
            .collect();
        angles.sort_by(f64::total_cmp);
        angles.dedup_by(|a, b| (*a - *b).abs() < 0.05);
        angles
            .iter()
            .map(|&a| center + Complex64::from_polar(rand::Rng::gen_range(rng, 0.5..3.0), a))
            .collect()
    };
    match rng.gen_range(0..3) {
        0 => loop {
            let v = polygon(rng);
            if let Ok(d) = polygon_domain(&v) {
                return d;
            }
        },
        1 => ConvexDomain::disc(center, rng.gen_range(0.5..3.0)).unwrap(),
        _ => loop {
            let v = polygon(rng);
            if let Ok(p) = polygon_domain(&v) {
                let disc = Disc::new(center + Complex64::new(rng.gen_range(-0.3..0.3), 0.0), rng.gen_range(1.0..3.0));
                if let Ok(d) = ConvexDomain::new(p.halfplanes().to_vec(), vec![disc]) {
                    return d;
                }
            }
        },
    }
}

/// Convex hull of star-shaped points given in angular order, as a domain.
pub fn polygon_domain(points: &[Complex64]) -> Result<ConvexDomain, expseries::geometry::GeometryError> {
    let hull = convex_hull(points);
    ConvexDomain::polygon(&hull)
}

/// Counter-clockwise convex hull (monotone chain).
pub fn convex_hull(points: &[Complex64]) -> Vec<Complex64> {
    let mut p = points.to_vec();
    p.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    let cross = |o: Complex64, a: Complex64, b: Complex64| (a - o).re * (b - o).im - (a - o).im * (b - o).re;
    let mut lower: Vec<Complex64> = Vec::new();
    for &q in &p {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], q) <= 0.0 {
            lower.pop();
        }
        lower.push(q);
    }
    let mut upper: Vec<Complex64> = Vec::new();
    for &q in p.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], q) <= 0.0 {
            upper.pop();
        }
        upper.push(q);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// Candidate maximizers of a linear functional over the closure of a
/// bounded domain: vertices where two constraint boundaries meet, and
/// `per_circle` points on every circle, all filtered by feasibility.
pub fn boundary_samples(domain: &ConvexDomain, per_circle: usize) -> Vec<Complex64> {
    let lines: Vec<(Complex64, f64)> = domain
        .halfplanes()
        .iter()
        .filter_map(|h| h.bound.finite().map(|b| (h.direction.unit(), b)))
        .collect();
    let circles: Vec<(Complex64, f64)> = domain.discs().iter().map(|d| (d.center, d.radius)).collect();
    let mut cands = Vec::new();
    for (i, &(u1, b1)) in lines.iter().enumerate() {
        for &(u2, b2) in &lines[i + 1..] {
            let det = -u1.re * u2.im + u1.im * u2.re;
            if det.abs() > 1e-14 {
                cands.push(Complex64::new((-b1 * u2.im + u1.im * b2) / det, (u1.re * b2 - u2.re * b1) / det));
            }
        }
        // Line Re(u z) = b is z = b·ū + i·t·ū.
        for &(c, r) in &circles {
            let base = b1 * u1.conj();
            let dir = Complex64::new(0.0, 1.0) * u1.conj();
            let off = base - c;
            let pb = (off * dir.conj()).re;
            let disc = pb * pb - (off.norm_sqr() - r * r);
            if disc >= 0.0 {
                for t in [-pb - disc.sqrt(), -pb + disc.sqrt()] {
                    cands.push(base + dir * t);
                }
            }
        }
    }
    for &(c, r) in &circles {
        for k in 0..per_circle {
            cands.push(c + Complex64::from_polar(r, std::f64::consts::TAU * k as f64 / per_circle as f64));
        }
    }
    for (i, &(c1, r1)) in circles.iter().enumerate() {
        for &(c2, r2) in &circles[i + 1..] {
            let d = (c2 - c1).norm();
            if d > 0.0 && d <= r1 + r2 && d >= (r1 - r2).abs() {
                let a = (r1 * r1 - r2 * r2 + d * d) / (2.0 * d);
                let h = (r1 * r1 - a * a).max(0.0).sqrt();
                let e = (c2 - c1) / d;
                let m = c1 + e * a;
                let n = Complex64::new(0.0, 1.0) * e;
                cands.push(m + n * h);
                cands.push(m - n * h);
            }
        }
    }
    let feasible = |z: Complex64| {
        let slop = 1e-9 * (1.0 + z.norm());
        lines.iter().all(|&(u, b)| (u * z).re <= b + slop) && circles.iter().all(|&(c, r)| (z - c).norm() <= r + slop)
    };
    cands.into_iter().filter(|&z| feasible(z)).collect()
}

/// Gaussian elimination with partial pivoting; returns the solution and
/// the determinant.
pub fn dense_solve(a: &DMatrix<Complex64>, b: &[Complex64]) -> (Vec<Complex64>, Complex64) {
    let n = a.nrows();
    let mut m = a.clone();
    let mut x = b.to_vec();
    let mut det = Complex64::new(1.0, 0.0);
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| m[(i, col)].norm().total_cmp(&m[(j, col)].norm()))
            .unwrap();
        if piv != col {
            m.swap_rows(piv, col);
            x.swap(piv, col);
            det = -det;
        }
        let p = m[(col, col)];
        det *= p;
        for r in col + 1..n {
            let f = m[(r, col)] / p;
            for c in col..n {
                let v = m[(col, c)];
                m[(r, c)] -= f * v;
            }
            let v = x[col];
            x[r] -= f * v;
        }
    }
    for col in (0..n).rev() {
        let mut s = x[col];
        for c in col + 1..n {
            s -= m[(col, c)] * x[c];
        }
        x[col] = s / m[(col, col)];
    }
    (x, det)
}

/// 2-norm condition number of the matrix after scaling every column to
/// unit 2-norm.
pub fn column_scaled_condition(a: &DMatrix<Complex64>) -> f64 {
    let mut m = a.clone();
    for mut c in m.column_iter_mut() {
        let n = c.norm();
        c /= Complex64::new(n, 0.0);
    }
    let sv = m.singular_values();
    let max = sv.iter().copied().fold(0.0, f64::max);
    let min = sv.iter().copied().fold(f64::INFINITY, f64::min);
    max / min
}
