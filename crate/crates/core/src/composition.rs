//! Standard compositions `f = s_m o h_m o ... o s_1 o h_1` and the bounded
//! distortion machinery built on them.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::interval::{cross_ratio_big_cr, cross_ratio_cr, Interval, PointQuadruple};
use crate::map::{Kind, MapDescriptor, CHAIN_TOLERANCE};
use crate::mobius::Mobius;
use crate::solve::bisect_predicate;

/// Points per stage used to validate the sign of the Schwarzian.
pub const SCHWARZIAN_CHECK_POINTS: usize = 65;

/// Default number of random quadruples per stage for `d1`.
pub const D1_SAMPLES: usize = 100_000;

/// Side of the coarse quadruple grid used for `d1`.
pub const D1_GRID: usize = 20;

/// One `(h, sigma)` pair.
#[derive(Clone, Debug)]
pub struct Stage {
    pub h: MapDescriptor,
    pub sigma: MapDescriptor,
}

/// An ordered chain of stages with matching domains and images.
#[derive(Clone, Debug)]
pub struct StandardComposition {
    stages: Vec<Stage>,
}

/// `d1` together with how it was sampled.
#[derive(Clone, Debug, PartialEq)]
pub struct D1Estimate {
    pub value: f64,
    pub per_stage: Vec<f64>,
    pub samples: usize,
    pub grid_points: usize,
}

/// Both norms of a composition.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CompositionNorms {
    pub d1: f64,
    pub d2: f64,
}

/// Outcome of [`ubdl_verify`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UbdlBoundReport {
    pub d1: f64,
    pub d2: f64,
    /// `log Cr(a, b, c, d)`.
    pub cross_ratio_term: f64,
    pub bound_technical: f64,
    pub bound_simplified: f64,
    pub measured: f64,
    pub q_used: f64,
    pub grid: GridSpec,
    pub pass: bool,
}

/// Outcome of [`extend_domain_dprime`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DomainExtension {
    /// The extended endpoint; on the right of `c`, or on the left of `b`
    /// when the configuration was reflected.
    pub d_prime: f64,
    /// Closed-form solution of the same equation.
    pub closed_form: f64,
    pub reflected: bool,
}

impl StandardComposition {
    /// Validates chaining and the sign of every `sigma`'s Schwarzian.
    pub fn new(stages: Vec<Stage>) -> Result<Self> {
        if stages.is_empty() {
            return Err(Error::InvalidParameter("a composition needs at least one stage"));
        }
        let mut prev: Option<Interval> = None;
        for (i, s) in stages.iter().enumerate() {
            if let Some(p) = prev {
                if !p.matches(&s.h.domain(), CHAIN_TOLERANCE) {
                    return Err(Error::DomainMismatch { stage: 2 * i });
                }
            }
            if !s.h.image().matches(&s.sigma.domain(), CHAIN_TOLERANCE) {
                return Err(Error::DomainMismatch { stage: 2 * i + 1 });
            }
            check_nonnegative_schwarzian(&s.sigma, i)?;
            prev = Some(s.sigma.image());
        }
        Ok(Self { stages })
    }

    pub fn stages(&self) -> &[Stage] {
        &self.stages
    }

    /// Stage count.
    pub fn m(&self) -> usize {
        self.stages.len()
    }

    /// The outer domain `(a, d)`.
    pub fn domain(&self) -> Interval {
        self.stages[0].h.domain()
    }

    pub fn image(&self) -> Interval {
        self.stages[self.stages.len() - 1].sigma.image()
    }

    /// The whole composition as one descriptor.
    pub fn descriptor(&self) -> MapDescriptor {
        let maps: Vec<MapDescriptor> = self
            .stages
            .iter()
            .flat_map(|s| [s.h.clone(), s.sigma.clone()])
            .collect();
        MapDescriptor::compose(maps).unwrap_or_else(|_| unreachable!("chaining was validated"))
    }

    /// `f_k`, the first `k` stages; `f_0` is the identity on `(a, d)`.
    pub fn partial(&self, k: usize) -> MapDescriptor {
        if k == 0 {
            return MapDescriptor::identity(self.domain());
        }
        let maps: Vec<MapDescriptor> = self.stages[..k]
            .iter()
            .flat_map(|s| [s.h.clone(), s.sigma.clone()])
            .collect();
        MapDescriptor::compose(maps).unwrap_or_else(|_| unreachable!("chaining was validated"))
    }

    /// The composition restricted to `sub`, stage by stage.
    pub fn restrict(&self, sub: &Interval) -> Result<Self> {
        let mut cur = *sub;
        let mut out = Vec::with_capacity(self.stages.len());
        for s in &self.stages {
            let h = s.h.restrict(&cur)?;
            let sigma = s.sigma.restrict(&h.image())?;
            cur = sigma.image();
            out.push(Stage { h, sigma });
        }
        Ok(Self { stages: out })
    }
}

fn check_nonnegative_schwarzian(sigma: &MapDescriptor, stage: usize) -> Result<()> {
    if matches!(sigma.kind(), Kind::Affine | Kind::LinearFractional { .. }) {
        return Ok(());
    }
    let dom = sigma.domain();
    let tol = 1e-7 / (dom.length() * dom.length());
    for k in 0..SCHWARZIAN_CHECK_POINTS {
        let x = dom.lo() + dom.length() * (k as f64 + 0.5) / SCHWARZIAN_CHECK_POINTS as f64;
        let s = sigma.schwarzian(x)?;
        if s < -tol {
            return Err(Error::SchwarzianViolation { stage, x, value: s });
        }
    }
    Ok(())
}

/// `d2 = sum of D(h_i)`.
pub fn d2_norm(c: &StandardComposition, grid: &GridSpec) -> f64 {
    c.stages.iter().map(|s| s.h.distortion_norm(grid).value).sum()
}

/// Log of the cross-ratio distortion of `h` on the quadruple `x`.
///
/// The value is `log[rho(a,b) rho(c,d) / (rho(a,d) rho(b,c))]`, using
/// increments so that close points do not cancel.
pub fn cross_ratio_distortion(h: &MapDescriptor, x: [f64; 4]) -> f64 {
    let img = |i: usize, j: usize| h.increment(x[i], x[j] - x[i]);
    let lhs = (img(0, 1) * img(2, 3)).ln() - (img(0, 3) * img(1, 2)).ln();
    let rhs = ((x[1] - x[0]) * (x[3] - x[2])).ln() - ((x[3] - x[0]) * (x[2] - x[1])).ln();
    lhs - rhs
}

fn stratified_point<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    match rng.gen_range(0..3) {
        0 => rng.gen::<f64>(),
        1 => 10f64.powf(-8.0 * rng.gen::<f64>()),
        _ => 1.0 - 10f64.powf(-8.0 * rng.gen::<f64>()),
    }
}

/// Infimum of the cross-ratio distortion of `h` over increasing quadruples,
/// truncated at 0 from above.
pub fn stage_cross_ratio_deficit<R: Rng + ?Sized>(h: &MapDescriptor, samples: usize, rng: &mut R) -> f64 {
    if matches!(h.kind(), Kind::Affine | Kind::LinearFractional { .. }) {
        return 0.0;
    }
    let dom = h.domain();
    let mut inf: f64 = 0.0;
    let mut consider = |t: [f64; 4]| {
        if let Ok(q) = PointQuadruple::new(t[0], t[1], t[2], t[3]) {
            let x = [dom.denormalize(q.p1), dom.denormalize(q.p2), dom.denormalize(q.p3), dom.denormalize(q.p4)];
            let v = cross_ratio_distortion(h, x);
            if v.is_finite() {
                inf = inf.min(v);
            }
        }
    };
    for k in 0..samples {
        let mut t = if k % 2 == 0 {
            [rng.gen::<f64>(), rng.gen(), rng.gen(), rng.gen()]
        } else {
            [stratified_point(rng), stratified_point(rng), stratified_point(rng), stratified_point(rng)]
        };
        t.sort_by(|a, b| a.partial_cmp(b).unwrap_or(core::cmp::Ordering::Equal));
        consider(t);
    }
    let g: Vec<f64> = (0..D1_GRID).map(|k| (k as f64 + 0.5) / D1_GRID as f64).collect();
    for i in 0..D1_GRID {
        for j in i + 1..D1_GRID {
            for k in j + 1..D1_GRID {
                for l in k + 1..D1_GRID {
                    consider([g[i], g[j], g[k], g[l]]);
                }
            }
        }
    }
    inf
}

/// `d1`, estimated with `samples` random quadruples per stage plus a coarse grid.
pub fn d1_norm(c: &StandardComposition, samples: usize, seed: u64) -> D1Estimate {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let per_stage: Vec<f64> = c
        .stages
        .iter()
        .map(|s| stage_cross_ratio_deficit(&s.h, samples, &mut rng))
        .collect();
    D1Estimate {
        value: per_stage.iter().sum(),
        per_stage,
        samples,
        grid_points: D1_GRID,
    }
}

/// Both norms at once.
pub fn composition_norms(c: &StandardComposition, samples: usize, seed: u64, grid: &GridSpec) -> CompositionNorms {
    CompositionNorms {
        d1: d1_norm(c, samples, seed).value,
        d2: d2_norm(c, grid),
    }
}

/// Splits every `h` with `D(h) > cap` into `ceil(D(h)/cap)` factors along
/// the straight-line family from the identity to `P(h)`, inserting identity
/// `sigma`s between the factors.
pub fn normalize_split(c: &StandardComposition, cap: f64, grid: &GridSpec) -> Result<StandardComposition> {
    if !(cap > 0.0) {
        return Err(Error::InvalidParameter("split cap must be positive"));
    }
    let mut out = Vec::with_capacity(c.m());
    for s in &c.stages {
        let d = s.h.distortion_norm(grid).value;
        if d <= cap {
            out.push(s.clone());
            continue;
        }
        let k = (d / cap).ceil() as usize;
        let dom = s.h.domain();
        for j in 1..=k {
            let image = if j == k { s.h.image() } else { dom };
            let factor = match s.h.lf_shift() {
                Some(shift) => MapDescriptor::linear_fractional(dom, image, shift / k as f64)?,
                None => MapDescriptor::interpolant(&s.h, (j - 1) as f64 / k as f64, j as f64 / k as f64, dom, image)?,
            };
            let sigma = if j == k { s.sigma.clone() } else { MapDescriptor::identity(dom) };
            out.push(Stage { h: factor, sigma });
        }
    }
    Ok(StandardComposition { stages: out })
}

/// `T_i o P(h_i) o T_i^{-1}` with `T_i = P(s_m) o ... o P(s_i)`.
#[derive(Clone, Debug)]
pub struct ConjugatedStage {
    h: MapDescriptor,
    outer: Vec<MapDescriptor>,
}

impl ConjugatedStage {
    pub fn apply(&self, y: f64) -> f64 {
        let mut z = y;
        for s in self.outer.iter().rev() {
            z = s.poincare_model_inverse(z);
        }
        z = self.h.poincare_model(z);
        for s in &self.outer {
            z = s.poincare_model(z);
        }
        z
    }
}

/// The factors of `P(f) = hbar_m o ... o hbar_1 o P(s_m) o ... o P(s_1)`.
#[derive(Clone, Debug)]
pub struct Reshuffled {
    pub conjugated: Vec<ConjugatedStage>,
    pub sigmas: Vec<MapDescriptor>,
}

impl Reshuffled {
    /// The reshuffled composition evaluated at `y`.
    pub fn apply(&self, y: f64) -> f64 {
        let z = self.sigma_part(y);
        self.conjugated.iter().fold(z, |z, h| h.apply(z))
    }

    /// `P(s_m) o ... o P(s_1)`.
    pub fn sigma_part(&self, y: f64) -> f64 {
        self.sigmas.iter().fold(y, |z, s| s.poincare_model(z))
    }

    /// `sum_i sup |hbar_i - id|` on the grid.
    pub fn displacement_sum(&self, grid: &GridSpec) -> f64 {
        self.conjugated
            .iter()
            .map(|h| grid.sup_abs(|y| h.apply(y) - y).value)
            .sum()
    }
}

pub fn reshuffle(c: &StandardComposition) -> Reshuffled {
    let sigmas: Vec<MapDescriptor> = c.stages.iter().map(|s| s.sigma.clone()).collect();
    let conjugated = c
        .stages
        .iter()
        .enumerate()
        .map(|(i, s)| ConjugatedStage {
            h: s.h.clone(),
            outer: sigmas[i..].to_vec(),
        })
        .collect();
    Reshuffled { conjugated, sigmas }
}

/// The technical bound `Q d2 e^{|d1|} min(1, (c-b)/min(b-a, d-c)) + d2 + 2|d1 + log Cr|`.
pub fn ubdl_technical_bound(norms: &CompositionNorms, outer: &Interval, sub: &Interval, q: f64) -> Result<f64> {
    let quad = PointQuadruple::new(outer.lo(), sub.lo(), sub.hi(), outer.hi())?;
    let lcr = cross_ratio_cr(&quad).ln();
    let near = (sub.lo() - outer.lo()).min(outer.hi() - sub.hi());
    let ratio = (sub.length() / near).min(1.0);
    Ok(q * norms.d2 * norms.d1.abs().exp() * ratio + norms.d2 + 2.0 * (norms.d1 + lcr).abs())
}

/// `K = 2 + 4 Q d2 e^{-d1}` for the simplified statement.
pub fn simplified_k(norms: &CompositionNorms, q: f64) -> f64 {
    2.0 + 4.0 * q * norms.d2 * (-norms.d1).exp()
}

/// Measures `D(f|sub)` and compares it with both bounds.
pub fn ubdl_verify(
    c: &StandardComposition,
    sub: &Interval,
    q: f64,
    norms: &CompositionNorms,
    grid: &GridSpec,
) -> Result<UbdlBoundReport> {
    let outer = c.domain();
    if !(sub.lo() > outer.lo() && sub.hi() < outer.hi()) {
        return Err(Error::InvalidInterval {
            lo: sub.lo(),
            hi: sub.hi(),
        });
    }
    let quad = PointQuadruple::new(outer.lo(), sub.lo(), sub.hi(), outer.hi())?;
    let lcr = cross_ratio_cr(&quad).ln();
    let technical = ubdl_technical_bound(norms, &outer, sub, q)?;
    let simplified = norms.d1 + norms.d2 + simplified_k(norms, q) * lcr.abs();
    let measured = c.descriptor().restrict(sub)?.distortion_norm(grid).value;
    Ok(UbdlBoundReport {
        d1: norms.d1,
        d2: norms.d2,
        cross_ratio_term: lcr,
        bound_technical: technical,
        bound_simplified: simplified,
        measured,
        q_used: q,
        grid: *grid,
        pass: measured <= technical + 1e-9,
    })
}

/// Smallest `Q` for which the technical bound covers `measured`.
pub fn required_q(report: &UbdlBoundReport, outer: &Interval, sub: &Interval) -> f64 {
    let zero = CompositionNorms {
        d1: report.d1,
        d2: report.d2,
    };
    let base = ubdl_technical_bound(&zero, outer, sub, 0.0).unwrap_or(0.0);
    let slope = ubdl_technical_bound(&zero, outer, sub, 1.0).unwrap_or(0.0) - base;
    if report.measured <= base {
        0.0
    } else if slope > 0.0 {
        (report.measured - base) / slope
    } else {
        f64::INFINITY
    }
}

/// Closed-form `d'` for the right-hand extension.
pub fn dprime_closed_form(a: f64, b: f64, c: f64, d: f64, d1: f64) -> f64 {
    let big = ((d - c) * (b - a)) / ((c - b) * (d - a));
    let r = d1.exp() * big * (c - b) / (b - a);
    (c - r * a) / (1.0 - r)
}

/// Solves `CR(a, b, c, d') = e^{d1} CR(a, b, c, d)` for `d'` and checks that
/// the linear-fractional surrogate chain stays inside every stage's domain.
///
/// When `b - a > d - c` the configuration is reflected and the extension
/// happens to the left of `b`.
pub fn extend_domain_dprime(c: &StandardComposition, sub: &Interval, d1: f64) -> Result<DomainExtension> {
    let outer = c.domain();
    let (a, b, cc, d) = (outer.lo(), sub.lo(), sub.hi(), outer.hi());
    let reflected = b - a > d - cc;
    let (ra, rb, rc, rd) = if reflected { (-d, -cc, -b, -a) } else { (a, b, cc, d) };
    let quad = PointQuadruple::new(ra, rb, rc, rd)?;
    let target = d1.exp() * cross_ratio_big_cr(&quad);
    let cr_at = |x: f64| ((x - rc) * (rb - ra)) / ((rc - rb) * (x - ra));
    let root = bisect_predicate(|x| cr_at(x) < target, rc, rd, 1e-15 * (rd - ra));
    let closed = dprime_closed_form(ra, rb, rc, rd, d1);
    let (d_prime, closed_form) = if reflected { (-root, -closed) } else { (root, closed) };
    check_surrogate_chain(c, sub, d_prime, reflected)?;
    Ok(DomainExtension {
        d_prime,
        closed_form,
        reflected,
    })
}

fn check_surrogate_chain(c: &StandardComposition, sub: &Interval, ext: f64, reflected: bool) -> Result<()> {
    let outer = c.domain();
    // marked points are the three that stay fixed, plus the moving one
    let mut marked = if reflected {
        [sub.lo(), sub.hi(), outer.hi()]
    } else {
        [outer.lo(), sub.lo(), sub.hi()]
    };
    let mut moving = ext;
    for (i, s) in c.stages.iter().enumerate() {
        let hx = [s.h.value(marked[0]), s.h.value(marked[1]), s.h.value(marked[2])];
        let g = Mobius::through_points(marked, hx);
        let span = if reflected {
            Interval::new(moving, marked[2])
        } else {
            Interval::new(marked[0], moving)
        };
        let ok_span = span.map(|sp| g.pole().map_or(true, |p| !sp.contains(p))).unwrap_or(false);
        let gm = g.eval(moving);
        let inside = if reflected {
            gm > s.h.image().lo()
        } else {
            gm < s.h.image().hi()
        };
        if !(ok_span && inside && gm.is_finite()) {
            return Err(Error::SurrogateOverflow { stage: i });
        }
        moving = s.sigma.value(gm);
        marked = [s.sigma.value(hx[0]), s.sigma.value(hx[1]), s.sigma.value(hx[2])];
    }
    Ok(())
}
