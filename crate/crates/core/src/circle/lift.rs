//! Degree-one lifts of circle maps and arc arithmetic on the circle.

use alloc::sync::Arc;
use core::f64::consts::PI;
use core::fmt;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::Result;
use crate::interval::Interval;
use crate::map::{MapDescriptor, SmoothMap};

/// A lift `F` of an orientation-preserving circle map with `F(x+1) = F(x)+1`.
/// The critical point, when there is one, sits at `0`.
pub trait CircleLift: Send + Sync + fmt::Debug {
    fn lift(&self, x: f64) -> f64;

    /// `F(x + u) - F(x)`, overridden where cancellation can be avoided.
    fn increment(&self, x: f64, u: f64) -> f64 {
        self.lift(x + u) - self.lift(x)
    }

    /// Derivatives of orders 1 to 3.
    fn derivative(&self, x: f64, order: u8) -> f64;

    /// Order of the critical point, `1` for diffeomorphisms.
    fn critical_exponent(&self) -> f64;

    /// Arc around the critical point where the Schwarzian is non-positive.
    fn close_arc(&self) -> Interval {
        Interval::new(-0.25, 0.25).unwrap_or_else(|_| Interval::unit())
    }

    /// Arc where the derivative is bounded below.
    fn remote_arc(&self) -> Interval {
        Interval::new(0.2, 0.8).unwrap_or_else(|_| Interval::unit())
    }
}

/// Rigid rotation `x + omega`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rigid {
    pub omega: f64,
}

impl CircleLift for Rigid {
    fn lift(&self, x: f64) -> f64 {
        x + self.omega
    }

    fn increment(&self, _x: f64, u: f64) -> f64 {
        u
    }

    fn derivative(&self, _x: f64, order: u8) -> f64 {
        if order == 1 {
            1.0
        } else {
            0.0
        }
    }

    fn critical_exponent(&self) -> f64 {
        1.0
    }
}

/// Critical Arnold lift `x + omega - sin(2 pi x) / (2 pi)`, cubic at `0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Arnold {
    pub omega: f64,
}

impl CircleLift for Arnold {
    fn lift(&self, x: f64) -> f64 {
        x + self.omega - (2.0 * PI * x).sin() / (2.0 * PI)
    }

    fn increment(&self, x: f64, u: f64) -> f64 {
        // sin a - sin b = 2 cos((a+b)/2) sin((a-b)/2)
        u - (2.0 * PI * (x + 0.5 * u)).cos() * (PI * u).sin() / PI
    }

    fn derivative(&self, x: f64, order: u8) -> f64 {
        match order {
            1 => 2.0 * (PI * x).sin().powi(2),
            2 => 2.0 * PI * (2.0 * PI * x).sin(),
            _ => 4.0 * PI * PI * (2.0 * PI * x).cos(),
        }
    }

    fn critical_exponent(&self) -> f64 {
        3.0
    }
}

/// Largest `|F(x+1) - F(x) - 1|` over `points` samples of `[0, 1)`.
pub fn degree_one_defect(f: &dyn CircleLift, points: usize) -> f64 {
    (0..points)
        .map(|k| {
            let x = k as f64 / points as f64;
            (f.lift(x + 1.0) - f.lift(x) - 1.0).abs()
        })
        .fold(0.0, f64::max)
}

/// `F - n` as a map of the line, used for one step of a chain.
#[derive(Clone, Debug)]
pub struct ShiftedLift {
    pub f: Arc<dyn CircleLift>,
    pub shift: f64,
}

impl SmoothMap for ShiftedLift {
    fn value(&self, x: f64) -> f64 {
        self.f.lift(x) + self.shift
    }

    fn increment(&self, x: f64, u: f64) -> f64 {
        self.f.increment(x, u)
    }

    fn derivative(&self, x: f64, order: u8) -> Option<f64> {
        Some(self.f.derivative(x, order))
    }
}

/// `f` on the arc `i`, shifted by an integer so that the image starts in
/// `[-1/2, 1/2)`.
pub fn stage_descriptor(f: &Arc<dyn CircleLift>, i: &Interval) -> Result<MapDescriptor> {
    let n = circle_turns(f.lift(i.lo()));
    MapDescriptor::smooth(*i, Arc::new(ShiftedLift { f: f.clone(), shift: -n }))
}

/// The integer `n` with `x - n` in `[-1/2, 1/2)`.
#[inline]
pub fn circle_turns(x: f64) -> f64 {
    (x + 0.5).floor()
}

/// `x` reduced into `[-1/2, 1/2)`.
#[inline]
pub fn reduce(x: f64) -> f64 {
    x - circle_turns(x)
}

/// The same arc with its left end in `[-1/2, 1/2)`.
pub fn reduce_arc(i: &Interval) -> Interval {
    i.shifted(-circle_turns(i.lo()))
}

/// Distance on the circle of length one.
pub fn circle_distance(x: f64, y: f64) -> f64 {
    reduce(x - y).abs()
}

/// Whether the open arc contains an integer, i.e. the critical point.
pub fn contains_critical(i: &Interval) -> bool {
    let n = i.lo().floor() + 1.0;
    n < i.hi()
}

/// Distance from the arc to `0`, zero when it contains `0`.
pub fn distance_to_critical(i: &Interval) -> f64 {
    if contains_critical(i) {
        return 0.0;
    }
    circle_distance(i.lo(), 0.0).min(circle_distance(i.hi(), 0.0))
}

/// Length of the intersection of two arcs, each shorter than the circle.
pub fn arc_overlap(a: &Interval, b: &Interval) -> f64 {
    let shift = circle_turns(b.lo() - a.lo());
    let b = b.shifted(-shift);
    [-1.0, 0.0, 1.0]
        .iter()
        .map(|n| (a.hi().min(b.hi() + n) - a.lo().max(b.lo() + n)).max(0.0))
        .sum()
}

/// Whether two open arcs meet.
pub fn arcs_meet(a: &Interval, b: &Interval) -> bool {
    if a.length() >= 1.0 || b.length() >= 1.0 {
        return true;
    }
    (b.lo() - a.lo()).rem_euclid(1.0) < a.length() || (a.lo() - b.lo()).rem_euclid(1.0) < b.length()
}

/// Whether `inner` lies in `outer` up to `tol` at each end.
pub fn arc_contains(outer: &Interval, inner: &Interval, tol: f64) -> bool {
    if outer.length() >= 1.0 - tol {
        return true;
    }
    let mut d = (inner.lo() - outer.lo()).rem_euclid(1.0);
    if d > 1.0 - tol {
        d -= 1.0;
    }
    d >= -tol && d + inner.length() <= outer.length() + tol
}
