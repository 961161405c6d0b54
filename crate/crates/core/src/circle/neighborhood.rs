//! Fineness orders, symmetric neighborhoods of the critical point and
//! coarseness of partitions.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use super::lift::{arc_contains, arcs_meet, circle_turns, distance_to_critical, CircleLift};
use super::partition::DynamicalPartition;
use super::rotation::{ContinuedFraction, CriticalOrbit};
use crate::error::{Error, Result};
use crate::interval::{poincare_coordinate, Interval};
use crate::solve::bisect_predicate;

/// Derivative mismatch accepted at the ends of a symmetric neighborhood.
pub const SYMMETRY_TOL: f64 = 1e-10;

/// Where the radius is placed inside the range of fineness `lambda`.
pub const RADIUS_FRACTION: f64 = 0.9;

/// For each `i < depth`, whether `f^{q_i}(J)` meets `J`.
pub fn return_pattern(f: &dyn CircleLift, cf: &ContinuedFraction, j: &Interval) -> Vec<bool> {
    let shift = circle_turns(j.lo());
    let (lo, hi) = (j.lo() - shift, j.hi() - shift);
    let mut a = CriticalOrbit::starting_at(f, lo);
    // `hi` may sit past 1/2; its orbit is tracked relative to `lo`'s turns
    let mut b = CriticalOrbit::starting_at(f, hi - circle_turns(hi));
    let b_turns = circle_turns(hi) as i64;
    let arc = Interval::new(lo, hi).unwrap_or(*j);
    (0..cf.depth())
        .map(|i| {
            let t = cf.q[i] as usize;
            let (ka, ra) = a.at(t);
            let (kb, rb) = b.at(t);
            let end = (kb + b_turns - ka) as f64 + rb;
            match Interval::new(ra, end) {
                Ok(image) => arcs_meet(&image, &arc),
                // the image collapsed below rounding near the critical point
                Err(_) => (ra - arc.lo()).rem_euclid(1.0) < arc.length(),
            }
        })
        .collect()
}

/// `max{i : f^{q_i}(x) not in J for all x in J} + 1`.
pub fn fineness_order(f: &dyn CircleLift, cf: &ContinuedFraction, j: &Interval) -> Result<usize> {
    let pattern = return_pattern(f, cf, j);
    let last_free = pattern.iter().rposition(|&meets| !meets);
    match last_free {
        Some(i) if i + 1 == pattern.len() => Err(Error::DepthExhausted {
            needed: pattern.len() + 1,
            available: pattern.len(),
        }),
        Some(i) => Ok(i + 1),
        None => Ok(0),
    }
}

/// `fineness_order(J) >= lambda`, without needing the full depth.
pub fn fineness_at_least(f: &dyn CircleLift, cf: &ContinuedFraction, j: &Interval, lambda: usize) -> bool {
    if lambda == 0 {
        return true;
    }
    return_pattern(f, cf, j).iter().skip(lambda - 1).any(|&meets| !meets)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SymmetricNeighborhood {
    pub interval: Interval,
    pub lambda: usize,
    /// Radii `r` for which `U(r)` has fineness exactly `lambda`.
    pub radius_range: (f64, f64),
    /// Poincare coordinate of the critical point in `U`.
    pub critical_offset: f64,
}

/// The left end `l < 0` with `f'(l) = f'(r)`, searched inside the close arc.
pub fn matching_left_end(f: &dyn CircleLift, r: f64) -> Option<f64> {
    let close = f.close_arc();
    let target = f.derivative(r, 1);
    if f.derivative(close.lo(), 1) < target {
        return None;
    }
    // f' decreases on the left of the critical point
    Some(bisect_predicate(|l| f.derivative(l, 1) >= target, close.lo(), 0.0, 1e-17))
}

fn neighborhood(f: &dyn CircleLift, r: f64) -> Option<Interval> {
    matching_left_end(f, r).and_then(|l| Interval::new(l, r).ok())
}

/// Whether the derivative agrees at both ends of `u` and `u` holds `0`.
pub fn is_symmetric(f: &dyn CircleLift, u: &Interval) -> bool {
    let (a, b) = (f.derivative(u.lo(), 1), f.derivative(u.hi(), 1));
    u.contains_interior(0.0) && (a - b).abs() <= SYMMETRY_TOL * a.max(b).max(1e-300).max(1.0)
}

/// A symmetric neighborhood of fineness `lambda` inside the close arc.
pub fn symmetric_neighborhood(f: &dyn CircleLift, cf: &ContinuedFraction, lambda: usize) -> Result<SymmetricNeighborhood> {
    let close = f.close_arc();
    let unreachable = Error::FinenessUnreachable { lambda };
    let r_max = bisect_predicate(|r| neighborhood(f, r).is_some(), 0.0, close.hi(), 1e-16);
    let at_least = |r: f64, lam: usize| neighborhood(f, r).is_some_and(|u| fineness_at_least(f, cf, &u, lam));
    let tiny = 1e-9 * r_max;
    if !at_least(tiny, lambda + 1) {
        return Err(unreachable);
    }
    let edge = |lam: usize| {
        if at_least(r_max, lam) {
            r_max
        } else {
            bisect_predicate(|r| at_least(r, lam), tiny, r_max, 1e-16)
        }
    };
    let r_hi = edge(lambda);
    let r_lo = edge(lambda + 1);
    if !(r_lo < r_hi) {
        return Err(unreachable);
    }
    let r = r_lo + RADIUS_FRACTION * (r_hi - r_lo);
    let u = neighborhood(f, r).ok_or(unreachable.clone())?;
    if fineness_order(f, cf, &u)? != lambda {
        return Err(unreachable);
    }
    Ok(SymmetricNeighborhood {
        interval: u,
        lambda,
        radius_range: (r_lo, r_hi),
        critical_offset: poincare_coordinate(&u, 0.0)?,
    })
}

/// `c_j(V)`: sum of `(|I| / dist(I, 0))^2` over the elements of the
/// partition not contained in any arc of `v`. Infinite when such an element
/// touches `0`.
pub fn coarseness(partition: &DynamicalPartition, v: &[Interval]) -> f64 {
    let tol = 1e-12;
    partition
        .elements
        .iter()
        .filter(|e| !v.iter().any(|arc| arc_contains(arc, &e.interval, tol)))
        .map(|e| {
            let d = distance_to_critical(&e.interval);
            let ratio = e.interval.length() / d;
            ratio * ratio
        })
        .sum()
}
