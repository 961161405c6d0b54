//! Approximate maps, the inverse-direction cancellation decomposition of a
//! chain, and the quantities `D~` and `Delta` measured on it.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::cancellation::{CancellationDecomposition, CancellationStage};
use crate::circle::chain::ChainOfIntervals;
use crate::circle::lift::{arc_contains, distance_to_critical, CircleLift};
use crate::circle::neighborhood::is_symmetric;
use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::interval::Interval;
use crate::map::MapDescriptor;

/// `f^m` along a chain with every step outside `U` replaced by the affine map
/// onto the same image.
#[derive(Clone, Debug)]
pub struct ApproximateMap {
    pub chain: ChainOfIntervals,
    pub u: Interval,
    /// Whether step `i` keeps `f`, i.e. `I_i` lies in `U`.
    pub kept: Vec<bool>,
    pub composed: MapDescriptor,
}

impl ApproximateMap {
    pub fn kept_count(&self) -> usize {
        self.kept.iter().filter(|&&k| k).count()
    }
}

pub fn approximate(f: &dyn CircleLift, chain: &ChainOfIntervals, u: &Interval) -> Result<ApproximateMap> {
    if !is_symmetric(f, u) {
        return Err(Error::NotSymmetric);
    }
    let kept: Vec<bool> = (0..chain.m()).map(|i| arc_contains(u, &chain.intervals[i], 0.0)).collect();
    let composed = if chain.m() == 0 {
        MapDescriptor::identity(chain.intervals[0])
    } else {
        let stages = chain
            .stages
            .iter()
            .zip(&kept)
            .map(|(s, &k)| if k { s.clone() } else { MapDescriptor::affine(s.domain(), s.image()) })
            .collect();
        MapDescriptor::compose(stages)?
    };
    Ok(ApproximateMap {
        chain: chain.clone(),
        u: *u,
        kept,
        composed,
    })
}

/// `sup |P(f^m) - P(phi)|` on the guarded grid of the first interval.
pub fn main_theorem_gap(approx: &ApproximateMap, grid: &GridSpec) -> f64 {
    let direct = approx.chain.descriptor();
    grid.sup_abs(|y| direct.poincare_model(y) - approx.composed.poincare_model(y)).value
}

/// `H = h o g` with `h` linear-fractional, `P(h)(x) = x - (1/2) int N(H)`.
pub fn h_prescription(big_h: &MapDescriptor) -> Result<(MapDescriptor, MapDescriptor)> {
    let dom = big_h.domain();
    let delta = -0.5 * big_h.nonlinearity_integral(&dom)?;
    let h = MapDescriptor::linear_fractional(dom, big_h.image(), delta)?;
    let g = MapDescriptor::compose(alloc::vec![big_h.clone(), h.inverse()])?;
    Ok((h, g))
}

/// The decomposition of `f^{-m}` from the last interval back to the first.
/// Steps whose preimage lies in `U` become `sigma = f^{-1}`; the others are
/// split by [`h_prescription`].
pub fn inverse_decomposition(approx: &ApproximateMap) -> Result<CancellationDecomposition> {
    let chain = &approx.chain;
    let mut stages = Vec::with_capacity(chain.m());
    for i in (0..chain.m()).rev() {
        let inv = chain.stages[i].inverse();
        let (from, to) = (chain.intervals[i + 1], chain.intervals[i]);
        let stage = if approx.kept[i] {
            CancellationStage {
                g: MapDescriptor::identity(from),
                h: MapDescriptor::linear_fractional(from, from, 0.0)?,
                sigma: inv,
            }
        } else {
            let (h, g) = h_prescription(&inv)?;
            CancellationStage {
                g,
                h,
                sigma: MapDescriptor::identity(to),
            }
        };
        stages.push(stage);
    }
    CancellationDecomposition::new(stages)
}

/// `Delta` from the antiderivative `log f'`: the largest partial sum, in the
/// order the inverse stages are applied, of `(1/2) int_{I_i} N f` over the
/// steps outside `U`.
pub fn delta_circle(f: &dyn CircleLift, approx: &ApproximateMap) -> f64 {
    let mut sum = 0.0;
    let mut best: f64 = 0.0;
    for i in (0..approx.chain.m()).rev() {
        if approx.kept[i] {
            continue;
        }
        let j = approx.chain.intervals[i];
        sum += 0.5 * (f.derivative(j.hi(), 1).ln() - f.derivative(j.lo(), 1).ln());
        best = best.max(sum.abs());
    }
    best
}

/// `sum (|I_i| / dist(I_i, 0))^2` over the steps outside `U`.
pub fn chain_coarseness(approx: &ApproximateMap) -> f64 {
    (0..approx.chain.m())
        .filter(|&i| !approx.kept[i])
        .map(|i| {
            let j = approx.chain.intervals[i];
            (j.length() / distance_to_critical(&j)).powi(2)
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cancellation::{cancellation_verify, d_tilde, delta_max};
    use crate::circle::chain::build_chain;
    use crate::circle::lift::{Arnold, Rigid};
    use crate::circle::rotation::{find_parameter, golden_prefix, rotation_number};
    use crate::experiments::standard_chain;
    use alloc::sync::Arc;

    const GOLDEN: f64 = 0.618_033_988_749_894_8;

    fn iv(a: f64, b: f64) -> Interval {
        Interval::new(a, b).unwrap()
    }

    fn golden_arnold() -> Arc<dyn CircleLift> {
        let w = find_parameter(|w| Arnold { omega: w }, 0.5, 0.7, 0, &golden_prefix(16)).unwrap();
        Arc::new(Arnold { omega: w })
    }

    #[test]
    fn prescription_examples() {
        let dom = iv(0.0, 1.0);
        let a = MapDescriptor::affine(dom, iv(2.0, 5.0));
        let (h, g) = h_prescription(&a).unwrap();
        assert_eq!(h.lf_shift(), Some(0.0));
        let grid = GridSpec::with_points(256);
        assert!(g.distortion_norm(&grid).value < 1e-12);
        let n = 0.3;
        let cn = MapDescriptor::constant_nonlinearity(dom, dom, n).unwrap();
        let (h, g) = h_prescription(&cn).unwrap();
        assert!((h.lf_shift().unwrap() + n / 2.0).abs() < 1e-15);
        for k in 1..20 {
            let x = f64::from(k) / 20.0;
            let hg = MapDescriptor::compose(alloc::vec![g.clone(), h.clone()]).unwrap();
            assert!((hg.value(x) - cn.value(x)).abs() < 1e-9);
        }
    }

    #[test]
    fn rigid_rotation_has_no_gap() {
        let f: Arc<dyn CircleLift> = Arc::new(Rigid { omega: GOLDEN });
        let cf = rotation_number(f.as_ref(), 14).unwrap().cf;
        let chain = standard_chain(&f, &cf, 6).unwrap();
        let approx = approximate(f.as_ref(), &chain, &iv(-0.01, 0.01)).unwrap();
        let grid = GridSpec::with_points(512);
        assert!(main_theorem_gap(&approx, &grid) < 1e-12);
        let d = inverse_decomposition(&approx).unwrap();
        assert!(d_tilde(&d, &grid) < 1e-9);
        assert_eq!(delta_max(&d), 0.0);
        assert_eq!(delta_circle(f.as_ref(), &approx), 0.0);
    }

    #[test]
    fn chain_inside_u_is_kept() {
        let f = golden_arnold();
        let chain = build_chain(&f, &iv(0.01, 0.02), 0, true).unwrap();
        let approx = approximate(f.as_ref(), &chain, &iv(-0.1, 0.1)).unwrap();
        assert_eq!(approx.kept_count(), 0);
        assert_eq!(main_theorem_gap(&approx, &GridSpec::with_points(64)), 0.0);
        assert!(matches!(approximate(f.as_ref(), &chain, &iv(-0.1, 0.2)), Err(Error::NotSymmetric)));
    }

    #[test]
    fn arnold_decomposition_matches_antiderivative() {
        let f = golden_arnold();
        let cf = rotation_number(f.as_ref(), 16).unwrap().cf;
        let u = crate::circle::neighborhood::symmetric_neighborhood(f.as_ref(), &cf, 3).unwrap();
        let chain = standard_chain(&f, &cf, 7).unwrap();
        let approx = approximate(f.as_ref(), &chain, &u.interval).unwrap();
        assert!(approx.kept_count() > 0 && approx.kept_count() < chain.m());
        assert!(approx.composed.image().matches(chain.intervals.last().unwrap(), 1e-10));
        let d = inverse_decomposition(&approx).unwrap();
        assert!((delta_max(&d) - delta_circle(f.as_ref(), &approx)).abs() < 1e-10);
        // each delta is -1/2 of the log f' difference over the stage preimage
        let mut k = 0;
        for i in (0..chain.m()).rev() {
            let j = chain.intervals[i];
            let expected = if approx.kept[i] {
                0.0
            } else {
                0.5 * (f.derivative(j.hi(), 1).ln() - f.derivative(j.lo(), 1).ln())
            };
            assert!((d.deltas()[k] - expected).abs() < 1e-12);
            k += 1;
        }
        let grid = GridSpec::with_points(1024);
        assert!(d.translation_defect(&grid) < 1e-9);
        let r = cancellation_verify(&d, &grid).unwrap();
        assert!(r.pass && r.reduced_pass && r.reduction_pass, "{r:?}");
    }
}
