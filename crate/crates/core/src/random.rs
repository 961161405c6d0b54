//! Seeded generators of random maps, compositions and decompositions used by
//! the verification suites.

use alloc::sync::Arc;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use rand::Rng;

use crate::cancellation::{CancellationDecomposition, CancellationStage};
use crate::composition::{Stage, StandardComposition};
use crate::error::Result;
use crate::interval::Interval;
use crate::map::{Exponential, Logarithm, MapDescriptor, Tangent};
use crate::mobius::Mobius;

fn random_interval<R: Rng + ?Sized>(rng: &mut R) -> Interval {
    let lo = rng.gen_range(-2.0..2.0);
    let len = rng.gen_range(0.2..3.0);
    Interval::new(lo, lo + len).unwrap_or_else(|_| Interval::unit())
}

fn sub_interval<R: Rng + ?Sized>(rng: &mut R, lo: f64, hi: f64, min_frac: f64) -> Interval {
    let len = (hi - lo) * rng.gen_range(min_frac..1.0);
    let start = lo + (hi - lo - len) * rng.gen::<f64>();
    Interval::new(start, start + len).unwrap_or_else(|_| Interval::unit())
}

/// Increasing Mobius map with its pole at least a tenth of the length away.
pub fn random_mobius<R: Rng + ?Sized>(rng: &mut R, domain: &Interval) -> Mobius {
    let len = domain.length();
    let gap = len * rng.gen_range(0.1..3.0);
    let pole = if rng.gen::<bool>() { domain.lo() - gap } else { domain.hi() + gap };
    let a = rng.gen_range(-1.0..1.0);
    let b = len * len * rng.gen_range(0.2..3.0);
    // x -> a - b / (x - pole)
    Mobius::new(a, -a * pole - b, 1.0, -pole)
}

/// Linear-fractional descriptor from a random Mobius map on `domain`.
pub fn random_mobius_descriptor<R: Rng + ?Sized>(rng: &mut R, domain: &Interval) -> MapDescriptor {
    random_mobius(rng, domain)
        .descriptor(*domain)
        .unwrap_or_else(|_| MapDescriptor::identity(*domain))
}

/// `pre o inner o post` so that `inner`'s natural domain can be placed anywhere.
fn framed(domain: &Interval, inner: MapDescriptor, image: Option<Interval>) -> Result<MapDescriptor> {
    let mut parts = alloc::vec![MapDescriptor::affine(*domain, inner.domain())];
    let out = inner.image();
    parts.push(inner);
    if let Some(j) = image {
        parts.push(MapDescriptor::affine(out, j));
    }
    MapDescriptor::compose(parts)
}

/// A map with non-negative Schwarzian on `domain`.
pub fn random_nonneg_schwarzian<R: Rng + ?Sized>(rng: &mut R, domain: &Interval) -> MapDescriptor {
    let choice = rng.gen_range(0..5);
    let built = match choice {
        0 => Ok(random_mobius_descriptor(rng, domain)),
        1 => {
            let e = sub_interval(rng, -1.5, 1.5, 0.2);
            MapDescriptor::smooth(e, Arc::new(Tangent)).and_then(|t| framed(domain, t, None))
        }
        2 => {
            let lo = rng.gen_range(0.05..2.0);
            let e = Interval::new(lo, lo + rng.gen_range(0.2..4.0)).unwrap_or_else(|_| Interval::unit());
            MapDescriptor::smooth(e, Arc::new(Logarithm)).and_then(|t| framed(domain, t, None))
        }
        3 => {
            let lo = rng.gen_range(0.05..2.0);
            let e = Interval::new(lo, lo + rng.gen_range(0.2..3.0)).unwrap_or_else(|_| Interval::unit());
            let beta = rng.gen_range(0.2..0.95);
            MapDescriptor::power_law(e, beta, 0.0).and_then(|t| framed(domain, t, None))
        }
        _ => {
            // x^beta followed by log: both have non-negative Schwarzian
            let lo = rng.gen_range(0.2..2.0);
            let e = Interval::new(lo, lo + rng.gen_range(0.2..3.0)).unwrap_or_else(|_| Interval::unit());
            let beta = rng.gen_range(0.3..0.95);
            MapDescriptor::power_law(e, beta, 0.0).and_then(|p| {
                let l = MapDescriptor::smooth(p.image(), Arc::new(Logarithm))?;
                framed(domain, MapDescriptor::compose(alloc::vec![p, l])?, None)
            })
        }
    };
    built.unwrap_or_else(|_| MapDescriptor::identity(*domain))
}

/// A distortion stage on `domain` onto `image`, with `D` of order `scale`.
pub fn random_h<R: Rng + ?Sized>(rng: &mut R, domain: &Interval, image: &Interval, scale: f64) -> MapDescriptor {
    let built = match rng.gen_range(0..5) {
        0 => MapDescriptor::linear_fractional(*domain, *image, scale * rng.gen_range(-1.0..1.0)),
        1 | 2 => MapDescriptor::constant_nonlinearity(
            *domain,
            *image,
            2.0 * scale * rng.gen_range(-1.0..1.0) / domain.length(),
        ),
        3 => {
            let lo = rng.gen_range(0.3..3.0);
            let e = Interval::new(lo, lo + scale * lo * rng.gen_range(0.1..1.0)).unwrap_or_else(|_| Interval::unit());
            MapDescriptor::power_law(e, rng.gen_range(1.2..3.0), 0.0).and_then(|p| framed(domain, p, Some(*image)))
        }
        _ => {
            let lo = rng.gen_range(-1.0..1.0);
            let e = Interval::new(lo, lo + 2.0 * scale * rng.gen_range(0.1..1.0)).unwrap_or_else(|_| Interval::unit());
            MapDescriptor::smooth(e, Arc::new(Exponential)).and_then(|p| framed(domain, p, Some(*image)))
        }
    };
    built.unwrap_or_else(|_| MapDescriptor::affine(*domain, *image))
}

/// A smooth map on a random interval, used for the classical norm checks.
pub fn random_smooth<R: Rng + ?Sized>(rng: &mut R) -> MapDescriptor {
    let domain = random_interval(rng);
    let image = random_interval(rng);
    if rng.gen::<bool>() {
        let scale = rng.gen_range(0.1..2.0);
        let h = random_h(rng, &domain, &image, scale);
        if rng.gen::<bool>() {
            let s = random_nonneg_schwarzian(rng, &image);
            return MapDescriptor::compose(alloc::vec![h.clone(), s]).unwrap_or(h);
        }
        h
    } else {
        random_nonneg_schwarzian(rng, &domain)
    }
}

/// A random standard composition with `m` stages.
pub fn random_standard_composition<R: Rng + ?Sized>(rng: &mut R, m: usize, scale: f64) -> Result<StandardComposition> {
    let mut domain = Interval::unit();
    let mut stages = Vec::with_capacity(m);
    for _ in 0..m {
        let image = random_interval(rng);
        let h = random_h(rng, &domain, &image, scale);
        let sigma = random_nonneg_schwarzian(rng, &image);
        domain = sigma.image();
        stages.push(Stage { h, sigma });
    }
    StandardComposition::new(stages)
}

/// A random composition whose `h` stages are all identities.
pub fn random_pure_sigma_composition<R: Rng + ?Sized>(rng: &mut R, m: usize) -> Result<StandardComposition> {
    let mut domain = Interval::unit();
    let mut stages = Vec::with_capacity(m);
    for _ in 0..m {
        let h = MapDescriptor::identity(domain);
        let sigma = random_nonneg_schwarzian(rng, &domain);
        domain = sigma.image();
        stages.push(Stage { h, sigma });
    }
    StandardComposition::new(stages)
}

/// A random decomposition with the given displacements and `g`s of size
/// about `g_scale`.
pub fn random_decomposition<R: Rng + ?Sized>(
    rng: &mut R,
    deltas: &[f64],
    g_scale: f64,
) -> Result<CancellationDecomposition> {
    let mut domain = Interval::unit();
    let mut stages = Vec::with_capacity(deltas.len());
    for &delta in deltas {
        let g = if g_scale > 0.0 {
            MapDescriptor::constant_nonlinearity(domain, domain, 2.0 * g_scale * rng.gen_range(-1.0..1.0) / domain.length())?
        } else {
            MapDescriptor::identity(domain)
        };
        let image = random_interval(rng);
        let h = MapDescriptor::linear_fractional(domain, image, delta)?;
        let sigma = random_nonneg_schwarzian(rng, &image);
        domain = sigma.image();
        stages.push(CancellationStage { sigma, h, g });
    }
    CancellationDecomposition::new(stages)
}
