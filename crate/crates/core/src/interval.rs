//! Intervals, cross-ratios and Poincare coordinates on the real line.

use core::fmt;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

/// Relative gap below which a quadruple counts as degenerate.
pub const DEGENERATE_GAP: f64 = 1e-13;

/// Guard on normalized coordinates used by every grid evaluation.
pub const DEFAULT_EPS_GUARD: f64 = 1e-9;

/// An open interval `(lo, hi)` with `lo < hi`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval {
    lo: f64,
    hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if lo.is_finite() && hi.is_finite() && lo < hi {
            Ok(Self { lo, hi })
        } else {
            Err(Error::InvalidInterval { lo, hi })
        }
    }

    /// The unit interval `(0, 1)`.
    pub const fn unit() -> Self {
        Self { lo: 0.0, hi: 1.0 }
    }

    #[inline]
    pub fn lo(&self) -> f64 {
        self.lo
    }

    #[inline]
    pub fn hi(&self) -> f64 {
        self.hi
    }

    #[inline]
    pub fn length(&self) -> f64 {
        self.hi - self.lo
    }

    #[inline]
    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    /// Closed containment.
    #[inline]
    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    /// Open containment.
    #[inline]
    pub fn contains_interior(&self, x: f64) -> bool {
        self.lo < x && x < self.hi
    }

    /// Whether `other` lies inside `self`, allowing `tol` of slack at each end.
    pub fn contains_interval(&self, other: &Interval, tol: f64) -> bool {
        other.lo >= self.lo - tol && other.hi <= self.hi + tol
    }

    /// Normalized position of `x`, 0 at `lo` and 1 at `hi`.
    #[inline]
    pub fn normalize(&self, x: f64) -> f64 {
        (x - self.lo) / self.length()
    }

    #[inline]
    pub fn denormalize(&self, t: f64) -> f64 {
        self.lo + t * self.length()
    }

    /// Translate by `shift`.
    pub fn shifted(&self, shift: f64) -> Self {
        Self {
            lo: self.lo + shift,
            hi: self.hi + shift,
        }
    }

    /// Endpoint agreement up to `rel` times the larger length.
    pub fn matches(&self, other: &Interval, rel: f64) -> bool {
        let tol = rel * self.length().max(other.length());
        (self.lo - other.lo).abs() <= tol && (self.hi - other.hi).abs() <= tol
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.lo, self.hi)
    }
}

/// Four strictly increasing points.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PointQuadruple {
    pub p1: f64,
    pub p2: f64,
    pub p3: f64,
    pub p4: f64,
}

impl PointQuadruple {
    pub fn new(p1: f64, p2: f64, p3: f64, p4: f64) -> Result<Self> {
        let q = Self { p1, p2, p3, p4 };
        let span = p4 - p1;
        let min_gap = (p2 - p1).min(p3 - p2).min(p4 - p3);
        if !(span.is_finite() && span > 0.0) || min_gap < DEGENERATE_GAP * span {
            return Err(Error::DegenerateQuadruple);
        }
        Ok(q)
    }

    /// Sorts four points before validating.
    pub fn from_unsorted(mut pts: [f64; 4]) -> Result<Self> {
        pts.sort_by(|a, b| a.partial_cmp(b).unwrap_or(core::cmp::Ordering::Equal));
        Self::new(pts[0], pts[1], pts[2], pts[3])
    }
}

/// `Cr(a,b,c,d) = (b-a)(d-c) / ((c-a)(d-b))`.
pub fn cross_ratio_cr(q: &PointQuadruple) -> f64 {
    let PointQuadruple { p1, p2, p3, p4 } = *q;
    ((p2 - p1) * (p4 - p3)) / ((p3 - p1) * (p4 - p2))
}

/// `CR(a,b,c,d) = (d-c)(b-a) / ((c-b)(d-a))`.
pub fn cross_ratio_big_cr(q: &PointQuadruple) -> f64 {
    let PointQuadruple { p1, p2, p3, p4 } = *q;
    ((p4 - p3) * (p2 - p1)) / ((p3 - p2) * (p4 - p1))
}

/// `log(t / (1 - t))` for `x` normalized to `i`.
pub fn poincare_coordinate(i: &Interval, x: f64) -> Result<f64> {
    if !i.contains_interior(x) {
        return Err(Error::OutOfDomain { x, lo: i.lo, hi: i.hi });
    }
    // both gaps are measured from the nearer endpoint to keep relative precision
    Ok(((x - i.lo) / (i.hi - x)).ln())
}

/// Inverse of [`poincare_coordinate`].
pub fn poincare_coordinate_inverse(i: &Interval, y: f64) -> f64 {
    let p = UnitPoint::from_line(y);
    if p.left <= p.right {
        i.lo + i.length() * p.left
    } else {
        i.hi - i.length() * p.right
    }
}

/// Poincare distance between two interior points.
pub fn poincare_distance(i: &Interval, x: f64, y: f64) -> Result<f64> {
    Ok((poincare_coordinate(i, x)? - poincare_coordinate(i, y)?).abs())
}

/// A point of `(0,1)` carried as the pair `(t, 1 - t)` so that both sides
/// keep full relative precision near their endpoint.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UnitPoint {
    pub left: f64,
    pub right: f64,
}

impl UnitPoint {
    #[inline]
    pub fn from_left(t: f64) -> Self {
        Self {
            left: t,
            right: 1.0 - t,
        }
    }

    #[inline]
    pub fn from_right(s: f64) -> Self {
        Self {
            left: 1.0 - s,
            right: s,
        }
    }

    /// The point with Poincare coordinate `y` in `(0,1)`.
    #[inline]
    pub fn from_line(y: f64) -> Self {
        Self {
            left: 1.0 / (1.0 + (-y).exp()),
            right: 1.0 / (1.0 + y.exp()),
        }
    }

    #[inline]
    pub fn to_line(self) -> f64 {
        self.left.ln() - self.right.ln()
    }

    /// The normalized point of `x` in `i`, computed from the closer endpoint.
    #[inline]
    pub fn in_interval(i: &Interval, x: f64) -> Self {
        let len = i.length();
        Self {
            left: (x - i.lo) / len,
            right: (i.hi - x) / len,
        }
    }

    /// Back to absolute coordinates in `i`.
    #[inline]
    pub fn absolute(self, i: &Interval) -> f64 {
        if self.left <= self.right {
            i.lo + i.length() * self.left
        } else {
            i.hi - i.length() * self.right
        }
    }

    /// The smaller of the two sides.
    #[inline]
    pub fn small(self) -> f64 {
        self.left.min(self.right)
    }
}

/// The two-sided range `[-y_max, y_max]` of the guarded Poincare line.
pub fn guarded_line_bound(eps_guard: f64) -> f64 {
    ((1.0 - eps_guard) / eps_guard).ln()
}
