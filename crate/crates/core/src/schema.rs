//! JSON shapes shared by the command-line tool and library users.
//!
//! Complex numbers are `[re, im]` pairs; arcs are `[lo, hi]` pairs of angles;
//! an infinite bound is the string `"inf"`.

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::exponents::{Angle, ExponentError, ExponentSequence, RayTail};
use crate::exppoly::{ExpPolyError, ExpPolynomial, ExpTerm};
use crate::geometry::{ConvexDomain, Direction, Disc, Extended, GeometryError, HalfPlane};
use crate::interpolation::{HermiteData, HermiteEntry, InterpolationError, Node, NodeSet};

#[derive(Debug, Error)]
pub enum SchemaError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Exponents(#[from] ExponentError),
    #[error(transparent)]
    ExpPoly(#[from] ExpPolyError),
    #[error(transparent)]
    Interpolation(#[from] InterpolationError),
    #[error("{0}")]
    Invalid(String),
}

pub type Pair = [f64; 2];

pub fn to_complex(p: Pair) -> Complex64 {
    Complex64::new(p[0], p[1])
}

pub fn from_complex(z: Complex64) -> Pair {
    [z.re, z.im]
}

/// A finite real or `+∞`, written as a number or `"inf"`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bound(pub Extended);

impl Serialize for Bound {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self.0 {
            Extended::Finite(x) => s.serialize_f64(x),
            Extended::PosInf => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Bound {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(x) if x.is_finite() => Ok(Bound(Extended::Finite(x))),
            Raw::Str(s) if s == "inf" => Ok(Bound(Extended::PosInf)),
            _ => Err(serde::de::Error::custom("bound must be a finite number or \"inf\"")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HalfPlaneJson {
    pub angle: f64,
    pub bound: Bound,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiscJson {
    pub cx: f64,
    pub cy: f64,
    pub r: f64,
}

/// `{"halfplanes":[{"angle","bound"}],"discs":[{"cx","cy","r"}]}`; the
/// half-plane with angle `φ` and bound `b` is `{Re(e^{iφ}z) < b}`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainJson {
    #[serde(default)]
    pub halfplanes: Vec<HalfPlaneJson>,
    #[serde(default)]
    pub discs: Vec<DiscJson>,
}

impl DomainJson {
    pub fn build(&self) -> Result<ConvexDomain, SchemaError> {
        let halfplanes = self
            .halfplanes
            .iter()
            .map(|h| {
                if h.angle.is_finite() {
                    Ok(HalfPlane::new(Direction::new(h.angle), h.bound.0))
                } else {
                    Err(SchemaError::Invalid("half-plane angle must be finite".into()))
                }
            })
            .collect::<Result<Vec<_>, _>>()?;
        let discs = self
            .discs
            .iter()
            .map(|d| Disc::new(Complex64::new(d.cx, d.cy), d.r))
            .collect();
        Ok(ConvexDomain::new(halfplanes, discs)?)
    }

    pub fn from_domain(d: &ConvexDomain) -> Self {
        Self {
            halfplanes: d
                .halfplanes()
                .iter()
                .map(|h| HalfPlaneJson {
                    angle: h.direction.angle(),
                    bound: Bound(h.bound),
                })
                .collect(),
            discs: d
                .discs()
                .iter()
                .map(|c| DiscJson {
                    cx: c.center.re,
                    cy: c.center.im,
                    r: c.radius,
                })
                .collect(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TailJson {
    Ray { angle: f64, ratio: f64, start: f64 },
}

impl TailJson {
    pub fn build(&self) -> Result<RayTail, SchemaError> {
        let TailJson::Ray { angle, ratio, start } = *self;
        Ok(RayTail::new(angle, ratio, start)?)
    }

    pub fn from_tail(t: &RayTail) -> Self {
        TailJson::Ray {
            angle: t.direction().angle(),
            ratio: t.ratio(),
            start: t.start(),
        }
    }
}

/// `{"values":[[re,im]],"tail":{"kind":"ray","angle","ratio","start"}|null}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExponentsJson {
    #[serde(default)]
    pub values: Vec<Pair>,
    #[serde(default)]
    pub tail: Option<TailJson>,
}

impl ExponentsJson {
    pub fn build(&self) -> Result<ExponentSequence, SchemaError> {
        let tail = self.tail.as_ref().map(TailJson::build).transpose()?;
        Ok(ExponentSequence::new(
            self.values.iter().copied().map(to_complex).collect(),
            tail,
        )?)
    }

    pub fn from_sequence(seq: &ExponentSequence) -> Self {
        Self {
            values: seq.values().iter().copied().map(from_complex).collect(),
            tail: seq.tail().map(TailJson::from_tail),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermJson {
    pub omega: f64,
    pub coeffs: Vec<Pair>,
}

/// `{"terms":[{"omega","coeffs":[[re,im]]}]}`, coefficients by ascending degree.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolynomialJson {
    pub terms: Vec<TermJson>,
}

impl PolynomialJson {
    pub fn build(&self) -> Result<ExpPolynomial, SchemaError> {
        Ok(ExpPolynomial::new(
            self.terms
                .iter()
                .map(|t| ExpTerm::new(t.omega, t.coeffs.iter().copied().map(to_complex).collect()))
                .collect(),
        )?)
    }
}

/// `{"nodes":[{"mu","m"}],"limit"}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodesJson {
    pub nodes: Vec<Node>,
    pub limit: f64,
}

impl NodesJson {
    pub fn build(&self) -> Result<NodeSet, SchemaError> {
        Ok(NodeSet::new(self.nodes.clone(), self.limit)?)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntryJson {
    pub k: usize,
    pub j: usize,
    pub b: Pair,
}

/// `{"entries":[{"k","j","b":[re,im]}]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataJson {
    pub entries: Vec<EntryJson>,
}

impl DataJson {
    pub fn build(&self) -> HermiteData {
        HermiteData::new(
            self.entries
                .iter()
                .map(|e| HermiteEntry {
                    k: e.k,
                    j: e.j,
                    b: to_complex(e.b),
                })
                .collect(),
        )
    }
}

/// `{"beta","alpha"}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AngleJson {
    pub beta: f64,
    pub alpha: f64,
}

impl AngleJson {
    pub fn build(&self) -> Result<Angle, SchemaError> {
        Ok(Angle::new(self.beta, self.alpha)?)
    }
}
