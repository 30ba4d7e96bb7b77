use std::cmp::Ordering;
use std::fmt;

/// A real number or `+∞`.
///
/// Support values of unbounded domains are `PosInf`; that is a value in its
/// own right, compared totally against finite reals.
#[derive(Clone, Copy, Debug)]
pub enum Extended {
    Finite(f64),
    PosInf,
}

impl Extended {
    /// Wraps a float, mapping `f64::INFINITY` to `PosInf`.
    ///
    /// Panics on NaN or `-∞`; neither is a valid support value.
    pub fn from_f64(x: f64) -> Self {
        assert!(!x.is_nan(), "NaN is not an extended real");
        assert!(x != f64::NEG_INFINITY, "-inf is not representable");
        if x == f64::INFINITY {
            Extended::PosInf
        } else {
            Extended::Finite(x)
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Extended::Finite(_))
    }

    pub fn finite(&self) -> Option<f64> {
        match *self {
            Extended::Finite(x) => Some(x),
            Extended::PosInf => None,
        }
    }

    /// `f64::INFINITY` for `PosInf`.
    pub fn to_f64(&self) -> f64 {
        self.finite().unwrap_or(f64::INFINITY)
    }

    pub fn min(self, other: Self) -> Self {
        if self <= other {
            self
        } else {
            other
        }
    }
}

impl PartialEq for Extended {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Extended {}

impl PartialOrd for Extended {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Extended {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Extended::Finite(a), Extended::Finite(b)) => {
                a.partial_cmp(b).unwrap_or_else(|| a.total_cmp(b))
            }
            (Extended::Finite(_), Extended::PosInf) => Ordering::Less,
            (Extended::PosInf, Extended::Finite(_)) => Ordering::Greater,
            (Extended::PosInf, Extended::PosInf) => Ordering::Equal,
        }
    }
}

impl From<f64> for Extended {
    fn from(x: f64) -> Self {
        Extended::from_f64(x)
    }
}

impl fmt::Display for Extended {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Extended::Finite(x) => write!(f, "{x}"),
            Extended::PosInf => write!(f, "+inf"),
        }
    }
}
