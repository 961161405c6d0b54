//! Densities of a chain with respect to dynamical partitions.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use super::approximate::ApproximateMap;
use crate::circle::lift::{arc_contains, arc_overlap, arcs_meet, CircleLift};
use crate::circle::partition::{DynamicalPartition, PartitionElement};
use crate::error::Result;
use crate::interval::Interval;

/// Sub-grid size for conditional means of the nonlinearity.
pub const NONLINEARITY_SUBGRID: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ElementDensity {
    pub element: PartitionElement,
    /// `|I n U~|`.
    pub weight: f64,
    /// `E(chi | I)`.
    pub density: f64,
    pub disjoint_from_u: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DensityProfile {
    pub j: usize,
    pub u_tilde: Interval,
    pub values: Vec<ElementDensity>,
    /// `E(chi)` on `U~`.
    pub mean: f64,
    /// `max / min - 1` over the elements not inside `U`.
    pub v_j: f64,
    /// `int_{U~} |E(chi | D_j) - E(chi)|` with the normalized measure.
    pub l1_deviation: f64,
    /// Largest `|E(chi | I) - E(chi)|` over elements disjoint from `U`.
    pub max_deviation: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NonlinearitySplit {
    /// `int_{U~} chi n`, exact from `log f'`.
    pub total: f64,
    /// `int chi (n - E(n | D_j))`.
    pub oscillation: f64,
    /// `int chi E(n | D_j)`.
    pub mean_term: f64,
}

/// The chain intervals that count on `U~`: all except those inside `U`.
fn counted(approx: &ApproximateMap) -> Vec<Interval> {
    approx
        .chain
        .intervals
        .iter()
        .filter(|i| !arc_contains(&approx.u, i, 0.0))
        .copied()
        .collect()
}

/// The complement of `U` extended by the chain intervals straddling its ends.
pub fn u_tilde(approx: &ApproximateMap) -> Interval {
    let u = approx.u;
    let (mut start, mut end) = (u.hi(), u.lo() + 1.0);
    for i in &approx.chain.intervals {
        if arc_contains(&u, i, 0.0) || !arcs_meet(i, &u) {
            continue;
        }
        if i.contains_interior(u.hi()) {
            start = start.min(i.lo());
        }
        if i.contains_interior(u.lo()) {
            end = end.max(i.hi() + 1.0);
        }
    }
    Interval::new(start, end).unwrap_or_else(|_| unreachable!("U lies inside the close arc"))
}

pub fn density_profile(approx: &ApproximateMap, partition: &DynamicalPartition) -> Result<DensityProfile> {
    let ut = u_tilde(approx);
    let chain = counted(approx);
    let mut values = Vec::new();
    for e in &partition.elements {
        let weight = arc_overlap(&e.interval, &ut);
        if weight <= 0.0 {
            continue;
        }
        let mass: f64 = chain.iter().map(|c| arc_overlap(&e.interval, c)).sum();
        values.push(ElementDensity {
            element: *e,
            weight,
            density: mass / weight,
            disjoint_from_u: !arcs_meet(&e.interval, &approx.u),
        });
    }
    let mean = chain.iter().map(Interval::length).sum::<f64>() / ut.length();
    let outside: Vec<f64> = values
        .iter()
        .filter(|v| !arc_contains(&approx.u, &v.element.interval, 0.0))
        .map(|v| v.density)
        .collect();
    let max = outside.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = outside.iter().copied().fold(f64::INFINITY, f64::min);
    let v_j = if min > 0.0 { max / min - 1.0 } else { f64::INFINITY };
    let l1_deviation = values.iter().map(|v| v.weight * (v.density - mean).abs()).sum::<f64>() / ut.length();
    let max_deviation = values
        .iter()
        .filter(|v| v.disjoint_from_u)
        .map(|v| (v.density - mean).abs())
        .fold(0.0, f64::max);
    Ok(DensityProfile {
        j: partition.order,
        u_tilde: ut,
        values,
        mean,
        v_j,
        l1_deviation,
        max_deviation,
    })
}

impl DensityProfile {
    /// Length-weighted mean of the densities over `U~`.
    pub fn tower_mean(&self) -> f64 {
        self.values.iter().map(|v| v.density * v.weight).sum::<f64>() / self.u_tilde.length()
    }
}

/// Splits `int_{U~} chi n` with `E(n | D_j)` from sub-grid means.
pub fn nonlinearity_split(f: &dyn CircleLift, approx: &ApproximateMap, profile: &DensityProfile) -> NonlinearitySplit {
    let n = |x: f64| f.derivative(x, 2) / f.derivative(x, 1);
    let chain = counted(approx);
    let total: f64 = chain
        .iter()
        .map(|c| f.derivative(c.hi(), 1).ln() - f.derivative(c.lo(), 1).ln())
        .sum();
    let mut mean_term = 0.0;
    for v in &profile.values {
        if v.density == 0.0 {
            continue;
        }
        // sub-grid over the part of the element inside U~
        let e = v.element.interval;
        let ut = profile.u_tilde;
        let shift = (e.lo() - ut.lo()).div_euclid(1.0);
        let (lo, hi) = (e.lo().max(ut.lo() + shift), e.hi().min(ut.hi() + shift));
        let (lo, hi) = if hi > lo { (lo, hi) } else { (e.lo(), e.hi()) };
        let step = (hi - lo) / NONLINEARITY_SUBGRID as f64;
        let avg = (0..NONLINEARITY_SUBGRID)
            .map(|k| n(lo + (k as f64 + 0.5) * step))
            .sum::<f64>()
            / NONLINEARITY_SUBGRID as f64;
        mean_term += avg * v.density * v.weight;
    }
    NonlinearitySplit {
        total,
        oscillation: total - mean_term,
        mean_term,
    }
}

/// Checks `max g / min g > 1 + eps / (2 (1 + C1))` for step functions on
/// cells of the given lengths, where `int h = 1`, `inf h = C1`, `int g = 1`
/// and `int g h = 1 + eps`. Returns `(ratio, bound)`.
pub fn oscillation_bound(cells: &[f64], g: &[f64], h: &[f64]) -> (f64, f64) {
    let c1 = h.iter().copied().fold(f64::INFINITY, f64::min);
    let gh: f64 = cells.iter().zip(g).zip(h).map(|((c, g), h)| c * g * h).sum();
    let eps = gh - 1.0;
    let max = g.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = g.iter().copied().fold(f64::INFINITY, f64::min);
    (max / min, 1.0 + eps / (2.0 * (1.0 + c1)))
}
