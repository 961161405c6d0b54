//! Chains of intervals and first-return maps.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use super::lift::{arcs_meet, arc_contains, contains_critical, stage_descriptor, CircleLift};
use super::neighborhood::fineness_order;
use super::partition::dynamical_partition;
use super::rotation::ContinuedFraction;
use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::map::MapDescriptor;

/// Consecutive images `I_0, ..., I_m` with `f(I_i) = I_{i+1}`.
#[derive(Clone, Debug)]
pub struct ChainOfIntervals {
    pub intervals: Vec<Interval>,
    /// `f` on `I_i` onto `I_{i+1}`, one per step.
    pub stages: Vec<MapDescriptor>,
    pub disjoint: bool,
}

fn images(f: &Arc<dyn CircleLift>, seed: &Interval, m: usize) -> Result<(Vec<Interval>, Vec<MapDescriptor>)> {
    let mut intervals = vec![*seed];
    let mut stages = Vec::with_capacity(m);
    for _ in 0..m {
        let last = intervals[intervals.len() - 1];
        let s = stage_descriptor(f, &last)?;
        intervals.push(s.image());
        stages.push(s);
    }
    Ok((intervals, stages))
}

/// The arc with both ends pulled in by `rel` of its length.
fn shrunk(i: &Interval, rel: f64) -> Interval {
    let e = rel * i.length();
    Interval::new(i.lo() + e, i.hi() - e).unwrap_or(*i)
}

/// The chain of `m` images of `seed`, none of which may contain the critical
/// point. With `disjoint` set, pairwise disjointness is enforced too.
pub fn build_chain(f: &Arc<dyn CircleLift>, seed: &Interval, m: usize, disjoint: bool) -> Result<ChainOfIntervals> {
    if contains_critical(seed) {
        return Err(Error::CriticalCollision { step: 0 });
    }
    let (intervals, stages) = images(f, seed, m)?;
    if let Some(step) = intervals.iter().position(contains_critical) {
        return Err(Error::CriticalCollision { step });
    }
    if disjoint {
        // endpoints may touch up to rounding
        let shrink = |i: &Interval| shrunk(i, 1e-12);
        for a in 0..intervals.len() {
            for b in a + 1..intervals.len() {
                if arcs_meet(&shrink(&intervals[a]), &shrink(&intervals[b])) {
                    return Err(Error::ChainOverlap { first: a, second: b });
                }
            }
        }
    }
    Ok(ChainOfIntervals {
        intervals,
        stages,
        disjoint,
    })
}

impl ChainOfIntervals {
    /// Number of steps `m`.
    pub fn m(&self) -> usize {
        self.stages.len()
    }

    /// `f^m` on the first interval.
    pub fn descriptor(&self) -> MapDescriptor {
        if self.stages.is_empty() {
            return MapDescriptor::identity(self.intervals[0]);
        }
        MapDescriptor::compose(self.stages.clone()).unwrap_or_else(|_| unreachable!("stages chain by construction"))
    }

    /// Smallest fineness order among the intervals.
    pub fn fineness(&self, f: &dyn CircleLift, cf: &ContinuedFraction) -> Result<usize> {
        let mut best = usize::MAX;
        for i in &self.intervals {
            best = best.min(fineness_order(f, cf, i)?);
        }
        Ok(best)
    }

    pub fn total_length(&self) -> f64 {
        self.intervals.iter().map(Interval::length).sum()
    }
}

#[derive(Clone, Debug)]
pub struct ReturnBranch {
    pub domain: Interval,
    pub return_time: u64,
    /// `f^t` on the branch, composed stage by stage.
    pub map: MapDescriptor,
}

#[derive(Clone, Debug)]
pub struct FirstReturnMap {
    /// The two elements of `D_k` adjacent to `0`, joined.
    pub domain: Interval,
    pub branches: Vec<ReturnBranch>,
    /// Total length of all intermediate images.
    pub covering_length: f64,
    pub images_disjoint: bool,
}

/// First return map to the union of the two elements of `D_k` adjacent to
/// the critical point. Return times are measured, not assumed.
pub fn first_return_map(f: &Arc<dyn CircleLift>, cf: &ContinuedFraction, k: usize) -> Result<FirstReturnMap> {
    let d = dynamical_partition(f.as_ref(), cf, k)?;
    let domain = d.critical_neighborhood();
    let limit = cf.q[cf.q.len() - 1];
    let mut branches = Vec::new();
    let mut all = Vec::new();
    for base in d.adjacent_to_critical() {
        let mut cur = base.interval;
        let mut path = vec![cur];
        let mut stages = Vec::new();
        let t = loop {
            let s = stage_descriptor(f, &cur)?;
            cur = s.image();
            stages.push(s);
            if arcs_meet(&shrunk(&cur, 1e-9), &domain) {
                break stages.len() as u64;
            }
            if stages.len() as u64 > limit {
                return Err(Error::ReturnTimeOverflow { limit });
            }
            path.push(cur);
        };
        if !arc_contains(&domain, &cur, 1e-9 * domain.length()) {
            return Err(Error::TilingDefect {
                defect: cur.length(),
            });
        }
        all.extend(path);
        branches.push(ReturnBranch {
            domain: base.interval,
            return_time: t,
            map: MapDescriptor::compose(stages)?,
        });
    }
    let covering_length = all.iter().map(Interval::length).sum();
    let mut images_disjoint = true;
    for a in 0..all.len() {
        for b in a + 1..all.len() {
            if arcs_meet(&shrunk(&all[a], 1e-9), &shrunk(&all[b], 1e-9)) {
                images_disjoint = false;
            }
        }
    }
    Ok(FirstReturnMap {
        domain,
        branches,
        covering_length,
        images_disjoint,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circle::lift::{Arnold, Rigid};
    use crate::circle::partition::ElementKind;
    use crate::circle::rotation::{find_parameter, golden_prefix, rotation_number};

    const GOLDEN: f64 = 0.618_033_988_749_894_8;

    fn iv(a: f64, b: f64) -> Interval {
        Interval::new(a, b).unwrap()
    }

    fn golden_arnold() -> Arc<dyn CircleLift> {
        let w = find_parameter(|w| Arnold { omega: w }, 0.5, 0.7, 0, &golden_prefix(16)).unwrap();
        Arc::new(Arnold { omega: w })
    }

    #[test]
    fn trivial_and_invalid_chains() {
        let f: Arc<dyn CircleLift> = Arc::new(Rigid { omega: GOLDEN });
        let c = build_chain(&f, &iv(0.1, 0.2), 0, true).unwrap();
        assert_eq!(c.intervals.len(), 1);
        assert_eq!(c.m(), 0);
        assert!(matches!(build_chain(&f, &iv(-0.1, 0.1), 3, false), Err(Error::CriticalCollision { step: 0 })));
        // 0.35 + 0.618 passes through 1
        assert!(matches!(build_chain(&f, &iv(0.35, 0.4), 5, false), Err(Error::CriticalCollision { step: 1 })));
        assert!(matches!(build_chain(&f, &iv(0.05, 0.3), 2, true), Err(Error::ChainOverlap { .. })));
    }

    #[test]
    fn partition_chains_are_disjoint() {
        for f in [Arc::new(Rigid { omega: GOLDEN }) as Arc<dyn CircleLift>, golden_arnold()] {
            let cf = rotation_number(f.as_ref(), 14).unwrap().cf;
            for k in 3..9 {
                let d = dynamical_partition(f.as_ref(), &cf, k).unwrap();
                let seed = d
                    .elements
                    .iter()
                    .find(|e| e.kind == ElementKind::Lengthy && e.orbit_index == 1)
                    .unwrap()
                    .interval;
                let m = cf.q[k] as usize - 2;
                let c = build_chain(&f, &seed, m, true).unwrap();
                assert_eq!(c.intervals.len(), cf.q[k] as usize - 1);
                // the step after the last element wraps onto the critical point
                assert!(build_chain(&f, &seed, m + 1, false).is_err());
                let fin = c.fineness(f.as_ref(), &cf).unwrap();
                assert!(fin + 2 >= k && fin <= k + 2);
                let d = c.descriptor();
                assert!(d.image().matches(&c.intervals[m], 1e-12));
            }
        }
    }

    #[test]
    fn rigid_first_return_is_a_rotation() {
        let f: Arc<dyn CircleLift> = Arc::new(Rigid { omega: GOLDEN });
        let cf = rotation_number(f.as_ref(), 14).unwrap().cf;
        for k in 2..9 {
            let r = first_return_map(&f, &cf, k).unwrap();
            assert_eq!(r.branches.len(), 2);
            let mut times: Vec<u64> = r.branches.iter().map(|b| b.return_time).collect();
            times.sort_unstable();
            assert_eq!(times, vec![cf.q[k - 1], cf.q[k]]);
            assert!((r.covering_length - 1.0).abs() < 1e-8);
            assert!(r.images_disjoint);
            for b in &r.branches {
                let x = b.domain.midpoint();
                let shift = b.map.value(x) - x;
                let y = b.domain.lo() + 0.1 * b.domain.length();
                assert!((b.map.value(y) - y - shift).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn arnold_first_return() {
        let f = golden_arnold();
        let cf = rotation_number(f.as_ref(), 14).unwrap().cf;
        let r = first_return_map(&f, &cf, 4).unwrap();
        assert_eq!(r.branches.len(), 2);
        assert!((r.covering_length - 1.0).abs() < 1e-8);
        assert!(r.images_disjoint);
    }
}
