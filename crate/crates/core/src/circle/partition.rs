//! Dynamical partitions generated by the critical orbit.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use super::lift::{arc_contains, reduce_arc, CircleLift};
use super::rotation::{ContinuedFraction, CriticalOrbit};
use crate::error::{Error, Result};
use crate::interval::Interval;

/// Largest tiling defect accepted for a partition.
pub const TILING_TOLERANCE: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ElementKind {
    Lengthy,
    Short,
}

impl ElementKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ElementKind::Lengthy => "lengthy",
            ElementKind::Short => "short",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PartitionElement {
    pub interval: Interval,
    pub kind: ElementKind,
    pub orbit_index: u64,
}

/// `D_k`: the first `q_k` images of the arc between `0` and `F^{q_{k-1}}(0)`
/// (lengthy) and the first `q_{k-1}` images of the arc between `F^{q_k}(0)`
/// and `0` (short).
#[derive(Clone, Debug, PartialEq)]
pub struct DynamicalPartition {
    pub order: usize,
    pub elements: Vec<PartitionElement>,
    pub tiling_defect: f64,
}

/// The arc `F^i` of the base arc from `0` to `F^q(0) - p`.
fn orbit_arc(orbit: &mut CriticalOrbit<'_>, i: usize, q: usize, p: i64) -> Result<Interval> {
    let (ki, ri) = orbit.at(i);
    let (kj, rj) = orbit.at(i + q);
    let other = (kj - p - ki) as f64 + rj;
    let arc = if ri < other {
        Interval::new(ri, other)?
    } else {
        Interval::new(other, ri)?
    };
    Ok(reduce_arc(&arc))
}

/// Sum of gaps and overlaps between neighbours plus the total length error.
fn tiling_defect(elements: &[PartitionElement]) -> f64 {
    let mut arcs: Vec<Interval> = elements.iter().map(|e| e.interval).collect();
    arcs.sort_by(|a, b| a.lo().total_cmp(&b.lo()));
    let total: f64 = arcs.iter().map(Interval::length).sum();
    let mut defect = (total - 1.0).abs();
    for w in arcs.windows(2) {
        defect += (w[1].lo() - w[0].hi()).abs();
    }
    if let (Some(first), Some(last)) = (arcs.first(), arcs.last()) {
        defect += (first.lo() + 1.0 - last.hi()).abs();
    }
    defect
}

/// Builds `D_k` for `k >= 1`; needs `k` partial quotients.
pub fn dynamical_partition(f: &dyn CircleLift, cf: &ContinuedFraction, k: usize) -> Result<DynamicalPartition> {
    if k == 0 {
        return Err(Error::InvalidParameter("partition order starts at 1"));
    }
    if cf.depth() < k {
        return Err(Error::DepthExhausted {
            needed: k,
            available: cf.depth(),
        });
    }
    let kk = k as isize;
    let (q_long, q_short) = (cf.q_at(kk - 1) as usize, cf.q_at(kk) as usize);
    let (p_long, p_short) = (cf.p_at(kk - 1), cf.p_at(kk));
    let mut orbit = CriticalOrbit::new(f);
    let mut elements = Vec::with_capacity(q_long + q_short);
    for i in 0..q_short {
        elements.push(PartitionElement {
            interval: orbit_arc(&mut orbit, i, q_long, p_long)?,
            kind: ElementKind::Lengthy,
            orbit_index: i as u64,
        });
    }
    for i in 0..q_long {
        elements.push(PartitionElement {
            interval: orbit_arc(&mut orbit, i, q_short, p_short)?,
            kind: ElementKind::Short,
            orbit_index: i as u64,
        });
    }
    let defect = tiling_defect(&elements);
    if !(defect <= TILING_TOLERANCE) {
        return Err(Error::TilingDefect { defect });
    }
    Ok(DynamicalPartition {
        order: k,
        elements,
        tiling_defect: defect,
    })
}

impl DynamicalPartition {
    pub fn total_length(&self) -> f64 {
        self.elements.iter().map(|e| e.interval.length()).sum()
    }

    /// The two elements with `0` as an endpoint, lengthy first.
    pub fn adjacent_to_critical(&self) -> [PartitionElement; 2] {
        let find = |kind| {
            *self
                .elements
                .iter()
                .find(|e| e.kind == kind && e.orbit_index == 0)
                .unwrap_or_else(|| unreachable!("every partition has both base elements"))
        };
        [find(ElementKind::Lengthy), find(ElementKind::Short)]
    }

    /// The union of the two elements adjacent to `0`.
    pub fn critical_neighborhood(&self) -> Interval {
        let [a, b] = self.adjacent_to_critical();
        let lo = a.interval.lo().min(b.interval.lo());
        let hi = a.interval.hi().max(b.interval.hi());
        Interval::new(lo, hi).unwrap_or_else(|_| unreachable!())
    }

    pub fn is_adjacent_to_critical(&self, e: &PartitionElement) -> bool {
        e.orbit_index == 0
    }

    /// The element of `self` containing the arc, if any.
    pub fn container(&self, arc: &Interval, tol: f64) -> Option<&PartitionElement> {
        self.elements.iter().find(|e| arc_contains(&e.interval, arc, tol))
    }

    /// Whether every element of `self` lies inside an element of `coarser`.
    pub fn refines(&self, coarser: &DynamicalPartition, tol: f64) -> bool {
        self.elements.iter().all(|e| coarser.container(&e.interval, tol).is_some())
    }

    /// Elements sorted along the circle.
    pub fn sorted(&self) -> Vec<PartitionElement> {
        let mut v = self.elements.clone();
        v.sort_by(|a, b| a.interval.lo().total_cmp(&b.interval.lo()));
        v
    }

    /// Largest length ratio of two neighbouring elements.
    pub fn adjacent_ratio(&self) -> f64 {
        let v = self.sorted();
        let n = v.len();
        (0..n)
            .map(|i| {
                let a = v[i].interval.length();
                let b = v[(i + 1) % n].interval.length();
                a.max(b) / a.min(b)
            })
            .fold(1.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circle::lift::{Arnold, Rigid};
    use crate::circle::rotation::{find_parameter, golden_prefix, rotation_number};

    const GOLDEN: f64 = 0.618_033_988_749_894_8;

    fn golden_arnold() -> Arnold {
        let w = find_parameter(|w| Arnold { omega: w }, 0.5, 0.7, 0, &golden_prefix(16)).unwrap();
        Arnold { omega: w }
    }

    fn check_family(f: &dyn CircleLift, depth: usize, max_k: usize) {
        let cf = rotation_number(f, depth).unwrap().cf;
        let mut prev: Option<DynamicalPartition> = None;
        for k in 1..=max_k {
            let d = dynamical_partition(f, &cf, k).unwrap();
            assert!(d.tiling_defect < TILING_TOLERANCE);
            assert!((d.total_length() - 1.0).abs() < 1e-8);
            assert_eq!(d.elements.len() as u64, cf.q[k] + cf.q[k - 1]);
            if let Some(p) = &prev {
                assert!(d.refines(p, 1e-12));
                // short elements of the coarser partition reappear as lengthy ones
                for e in p.elements.iter().filter(|e| e.kind == ElementKind::Short) {
                    let twin = d
                        .elements
                        .iter()
                        .find(|x| x.kind == ElementKind::Lengthy && x.orbit_index == e.orbit_index)
                        .unwrap();
                    assert!(twin.interval.matches(&e.interval, 1e-9));
                }
                // each lengthy element splits into a_{k-1} lengthy and one short
                for e in p.elements.iter().filter(|e| e.kind == ElementKind::Lengthy) {
                    let inside: Vec<_> = d
                        .elements
                        .iter()
                        .filter(|x| arc_contains(&e.interval, &x.interval, 1e-12))
                        .collect();
                    let short = inside.iter().filter(|x| x.kind == ElementKind::Short).count();
                    assert_eq!(short, 1);
                    assert_eq!((inside.len() - 1) as u64, cf.a[k - 1]);
                }
            }
            prev = Some(d);
        }
    }

    #[test]
    fn rigid_partitions_tile_and_refine() {
        check_family(&Rigid { omega: GOLDEN }, 14, 10);
        check_family(&Rigid { omega: core::f64::consts::E - 2.0 }, 10, 7);
    }

    #[test]
    fn arnold_partitions_tile_and_refine() {
        let f = golden_arnold();
        check_family(&f, 14, 10);
        let cf = rotation_number(&f, 14).unwrap().cf;
        let d = dynamical_partition(&f, &cf, 6).unwrap();
        assert!(d.tiling_defect < 1e-8);
    }

    #[test]
    fn rigid_three_distance_lengths() {
        let f = Rigid { omega: GOLDEN };
        let cf = rotation_number(&f, 10).unwrap().cf;
        for k in 1..8 {
            let d = dynamical_partition(&f, &cf, k).unwrap();
            let long = GOLDEN.powi(k as i32);
            let short = GOLDEN.powi(k as i32 + 1);
            for e in &d.elements {
                let expected = match e.kind {
                    ElementKind::Lengthy => long,
                    ElementKind::Short => short,
                };
                assert!((e.interval.length() - expected).abs() < 1e-12);
            }
        }
        let d = dynamical_partition(&f, &cf, 2).unwrap();
        assert!(d.elements.iter().all(|e| {
            let l = e.interval.length();
            (l - GOLDEN.powi(2)).abs() < 1e-12 || (l - GOLDEN.powi(3)).abs() < 1e-12
        }));
    }

    #[test]
    fn bounded_geometry_is_recorded() {
        let f = golden_arnold();
        let cf = rotation_number(&f, 14).unwrap().cf;
        for k in 1..=8 {
            let r = dynamical_partition(&f, &cf, k).unwrap().adjacent_ratio();
            assert!(r.is_finite() && r < 50.0, "k={k} ratio={r}");
        }
    }

    #[test]
    fn depth_is_checked() {
        let f = Rigid { omega: GOLDEN };
        let cf = rotation_number(&f, 3).unwrap().cf;
        assert!(matches!(dynamical_partition(&f, &cf, 5), Err(Error::DepthExhausted { .. })));
    }
}
