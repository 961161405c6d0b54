//! Interval homeomorphisms, their derivatives, and the Poincare model operator.
//!
//! Every descriptor evaluates through the normalized pair form
//! `(t, 1 - t) -> (t', 1 - t')` so that points close to either endpoint keep
//! full relative precision. This is what makes sup-norms over the guarded
//! Poincare line meaningful: at `|y| = 20` the normalized coordinate is
//! about `1e-9`, far below the absolute resolution of a plain evaluation.

use alloc::boxed::Box;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::grid::{GridSpec, SupEstimate};
use crate::interval::{Interval, UnitPoint};
use crate::solve::solve_increasing;

/// Relative tolerance for chaining stage domains to images.
pub const CHAIN_TOLERANCE: f64 = 1e-10;

/// A smooth increasing map given by callbacks.
pub trait SmoothMap: Send + Sync + fmt::Debug {
    fn value(&self, x: f64) -> f64;

    /// `F(x + u) - F(x)`; override when cancellation matters.
    fn increment(&self, x: f64, u: f64) -> f64 {
        self.value(x + u) - self.value(x)
    }

    /// Closed-form derivative of order 1 to 3, if known.
    fn derivative(&self, _x: f64, _order: u8) -> Option<f64> {
        None
    }
}

/// `SmoothMap` from plain closures.
#[derive(Clone)]
pub struct Callbacks {
    pub value: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    pub derivative: Option<Arc<dyn Fn(f64, u8) -> f64 + Send + Sync>>,
}

impl fmt::Debug for Callbacks {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Callbacks")
            .field("derivative", &self.derivative.is_some())
            .finish()
    }
}

impl SmoothMap for Callbacks {
    fn value(&self, x: f64) -> f64 {
        (self.value)(x)
    }

    fn derivative(&self, x: f64, order: u8) -> Option<f64> {
        self.derivative.as_ref().map(|d| d(x, order))
    }
}

/// `tan x`, Schwarzian 2.
#[derive(Clone, Copy, Debug)]
pub struct Tangent;

impl SmoothMap for Tangent {
    fn value(&self, x: f64) -> f64 {
        x.tan()
    }

    fn increment(&self, x: f64, u: f64) -> f64 {
        u.sin() / (x.cos() * (x + u).cos())
    }

    fn derivative(&self, x: f64, order: u8) -> Option<f64> {
        let t = x.tan();
        let s = 1.0 + t * t;
        Some(match order {
            1 => s,
            2 => 2.0 * t * s,
            _ => 2.0 * s * (1.0 + 3.0 * t * t),
        })
    }
}

/// `log x` on the positive axis, Schwarzian `1 / (2 x^2)`.
#[derive(Clone, Copy, Debug)]
pub struct Logarithm;

impl SmoothMap for Logarithm {
    fn value(&self, x: f64) -> f64 {
        x.ln()
    }

    fn increment(&self, x: f64, u: f64) -> f64 {
        (u / x).ln_1p()
    }

    fn derivative(&self, x: f64, order: u8) -> Option<f64> {
        Some(match order {
            1 => 1.0 / x,
            2 => -1.0 / (x * x),
            _ => 2.0 / (x * x * x),
        })
    }
}

/// `exp x`, Schwarzian `-1/2`.
#[derive(Clone, Copy, Debug)]
pub struct Exponential;

impl SmoothMap for Exponential {
    fn value(&self, x: f64) -> f64 {
        x.exp()
    }

    fn increment(&self, x: f64, u: f64) -> f64 {
        x.exp() * u.exp_m1()
    }

    fn derivative(&self, x: f64, _order: u8) -> Option<f64> {
        Some(x.exp())
    }
}

/// The variants a descriptor can take.
#[derive(Clone, Debug)]
pub enum Kind {
    Affine,
    /// Normalized map `k t / (k t + 1 - t)` with `k = e^shift`; its Poincare
    /// model is the translation by `shift`.
    LinearFractional { shift: f64 },
    /// Constant pointwise nonlinearity `n`.
    ConstantNonlinearity { n: f64 },
    /// `sgn(x) |x|^beta + offset`.
    PowerLaw { beta: f64, offset: f64 },
    SmoothSampled(Arc<dyn SmoothMap>),
    Composition(Arc<[MapDescriptor]>),
    /// Generic restriction of `inner` to this descriptor's domain.
    Restriction(Box<Restricted>),
    Inverse(Arc<MapDescriptor>),
    /// Factor `H_to o H_from^{-1}` of the family `H_t = id + t (P(base) - id)`.
    Interpolant {
        base: Arc<MapDescriptor>,
        from: f64,
        to: f64,
    },
}

/// Data for [`Kind::Restriction`].
#[derive(Clone, Debug)]
pub struct Restricted {
    inner: MapDescriptor,
    a: UnitPoint,
    b: UnitPoint,
    ia: UnitPoint,
    ib: UnitPoint,
}

/// An increasing homeomorphism from `domain` onto `image`.
#[derive(Clone, Debug)]
pub struct MapDescriptor {
    kind: Kind,
    domain: Interval,
    image: Interval,
}

/// Output of [`MapDescriptor::koebe_check`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KoebeReport {
    /// Whether the Schwarzian is non-negative on the grid.
    pub precondition_ok: bool,
    pub min_schwarzian: f64,
    /// `max |N f(x)| min(x - a, d - x) / 2`.
    pub pointwise_ratio: f64,
    /// `max |log f'(y)/f'(z)| / (2 |log Cr(a,y,z,d)|)`.
    pub integrated_ratio: f64,
    pub points: usize,
}

/// A model value together with whether the input was outside the guard.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Guarded {
    pub value: f64,
    pub clamped: bool,
}

fn fd_derivs<F: Fn(f64, f64) -> f64>(inc: F, x: f64, len: f64) -> [f64; 3] {
    // fourth-order central stencils written with increments so that the
    // differences never cancel against the absolute value of the map
    let h = len * 1e-5;
    let a1 = inc(x - h, 2.0 * h);
    let a2 = inc(x - 2.0 * h, 4.0 * h);
    let d1 = (8.0 * a1 - a2) / (12.0 * h);
    let b1 = inc(x, h) - inc(x - h, h);
    let b2 = inc(x, 2.0 * h) - inc(x - 2.0 * h, 2.0 * h);
    let d2 = (16.0 * b1 - b2) / (12.0 * h * h);
    let h3 = len * 1e-4;
    let c1 = inc(x - h3, 2.0 * h3);
    let c2 = inc(x - 2.0 * h3, 4.0 * h3);
    let c3 = inc(x - 3.0 * h3, 6.0 * h3);
    let d3 = (8.0 * c2 - 13.0 * c1 - c3) / (8.0 * h3 * h3 * h3);
    [d1, d2, d3]
}

fn power_value(beta: f64, offset: f64, x: f64) -> f64 {
    let v = x.abs().powf(beta);
    if x < 0.0 {
        offset - v
    } else {
        offset + v
    }
}

fn power_increment(beta: f64, x: f64, u: f64) -> f64 {
    let y = x + u;
    if x != 0.0 && y != 0.0 && (x > 0.0) == (y > 0.0) {
        // same side of the critical point: relative form keeps small increments exact
        let r = (u / x).ln_1p();
        let v = x.abs().powf(beta) * (beta * r).exp_m1();
        if x > 0.0 {
            v
        } else {
            -v
        }
    } else {
        power_value(beta, 0.0, y) - power_value(beta, 0.0, x)
    }
}

impl MapDescriptor {
    fn raw(kind: Kind, domain: Interval, image: Interval) -> Self {
        Self { kind, domain, image }
    }

    /// The affine map from `domain` onto `image`.
    pub fn affine(domain: Interval, image: Interval) -> Self {
        Self::raw(Kind::Affine, domain, image)
    }

    pub fn identity(domain: Interval) -> Self {
        Self::affine(domain, domain)
    }

    /// The linear-fractional map whose Poincare model translates by `shift`.
    pub fn linear_fractional(domain: Interval, image: Interval, shift: f64) -> Result<Self> {
        if !shift.is_finite() {
            return Err(Error::InvalidParameter("linear-fractional shift must be finite"));
        }
        Ok(Self::raw(Kind::LinearFractional { shift }, domain, image))
    }

    /// A map with constant nonlinearity `n` at every point.
    pub fn constant_nonlinearity(domain: Interval, image: Interval, n: f64) -> Result<Self> {
        if !n.is_finite() {
            return Err(Error::InvalidParameter("nonlinearity must be finite"));
        }
        Ok(Self::raw(Kind::ConstantNonlinearity { n }, domain, image))
    }

    /// `x -> sgn(x)|x|^beta + offset` on `domain`.
    pub fn power_law(domain: Interval, beta: f64, offset: f64) -> Result<Self> {
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(Error::InvalidParameter("power-law exponent must be positive"));
        }
        let image = Interval::new(
            power_value(beta, offset, domain.lo()),
            power_value(beta, offset, domain.hi()),
        )?;
        Ok(Self::raw(Kind::PowerLaw { beta, offset }, domain, image))
    }

    /// A smooth map given by callbacks; the image is read off the endpoints.
    pub fn smooth(domain: Interval, map: Arc<dyn SmoothMap>) -> Result<Self> {
        let image = Interval::new(map.value(domain.lo()), map.value(domain.hi()))?;
        Ok(Self::raw(Kind::SmoothSampled(map), domain, image))
    }

    /// `stages[last] o ... o stages[0]`, validating the chaining.
    pub fn compose(stages: Vec<MapDescriptor>) -> Result<Self> {
        let first = stages.first().ok_or(Error::InvalidParameter("empty composition"))?;
        let domain = first.domain;
        for (i, w) in stages.windows(2).enumerate() {
            if !w[0].image.matches(&w[1].domain, CHAIN_TOLERANCE) {
                return Err(Error::DomainMismatch { stage: i + 1 });
            }
        }
        let image = stages[stages.len() - 1].image;
        if stages.len() == 1 {
            return Ok(stages.into_iter().next().unwrap_or_else(|| unreachable!()));
        }
        Ok(Self::raw(Kind::Composition(stages.into()), domain, image))
    }

    /// The inverse map from `image` back to `domain`.
    pub fn inverse(&self) -> Self {
        match &self.kind {
            Kind::Affine => Self::affine(self.image, self.domain),
            Kind::LinearFractional { shift } => Self::raw(
                Kind::LinearFractional { shift: -shift },
                self.image,
                self.domain,
            ),
            Kind::Inverse(inner) => (**inner).clone(),
            _ => Self::raw(Kind::Inverse(Arc::new(self.clone())), self.image, self.domain),
        }
    }

    /// The factor `H_to o H_from^{-1}` of the straight-line family from the
    /// identity to `P(base)`, presented from `domain` onto `image`.
    pub fn interpolant(base: &MapDescriptor, from: f64, to: f64, domain: Interval, image: Interval) -> Result<Self> {
        if !(0.0..=1.0).contains(&from) || !(0.0..=1.0).contains(&to) {
            return Err(Error::InvalidParameter("interpolation parameters must lie in [0, 1]"));
        }
        Ok(Self::raw(
            Kind::Interpolant {
                base: Arc::new(base.clone()),
                from,
                to,
            },
            domain,
            image,
        ))
    }

    /// Same normalized map presented between other intervals.
    pub fn with_intervals(&self, domain: Interval, image: Interval) -> Result<Self> {
        match self.kind {
            Kind::Affine | Kind::LinearFractional { .. } | Kind::Interpolant { .. } => {
                Ok(Self::raw(self.kind.clone(), domain, image))
            }
            Kind::ConstantNonlinearity { n } => {
                Self::constant_nonlinearity(domain, image, n * self.domain.length() / domain.length())
            }
            _ => Err(Error::InvalidParameter("only normalized kinds can be re-presented")),
        }
    }

    #[inline]
    pub fn domain(&self) -> Interval {
        self.domain
    }

    #[inline]
    pub fn image(&self) -> Interval {
        self.image
    }

    #[inline]
    pub fn kind(&self) -> &Kind {
        &self.kind
    }

    /// The translation amount when the descriptor is linear-fractional.
    pub fn lf_shift(&self) -> Option<f64> {
        match self.kind {
            Kind::LinearFractional { shift } => Some(shift),
            Kind::Affine => Some(0.0),
            _ => None,
        }
    }

    /// Stages of a composition, or the map itself.
    pub fn stages(&self) -> &[MapDescriptor] {
        match &self.kind {
            Kind::Composition(s) => s,
            _ => core::slice::from_ref(self),
        }
    }

    /// The map in normalized coordinates of domain and image.
    pub fn normalized(&self, p: UnitPoint) -> UnitPoint {
        if p.left <= 0.0 || p.right <= 0.0 {
            return p;
        }
        match &self.kind {
            Kind::Affine => p,
            Kind::LinearFractional { shift } => {
                if *shift == 0.0 {
                    return p;
                }
                let k = shift.exp();
                let den = k * p.left + p.right;
                UnitPoint {
                    left: k * p.left / den,
                    right: p.right / den,
                }
            }
            Kind::ConstantNonlinearity { n } => {
                let big = n * self.domain.length();
                if big == 0.0 {
                    return p;
                }
                let e = big.exp_m1();
                UnitPoint {
                    left: (big * p.left).exp_m1() / e,
                    right: (big * p.left).exp() * (big * p.right).exp_m1() / e,
                }
            }
            Kind::PowerLaw { beta, .. } => {
                let b = *beta;
                self.absolute_normalized(|x, u| power_increment(b, x, u), p)
            }
            Kind::SmoothSampled(m) => self.absolute_normalized(|x, u| m.increment(x, u), p),
            Kind::Composition(stages) => stages.iter().fold(p, |q, s| s.normalized(q)),
            Kind::Restriction(r) => {
                let w = r.b.left - r.a.left;
                let q = UnitPoint {
                    left: r.a.left + p.left * w,
                    right: r.b.right + p.right * w,
                };
                let q = r.inner.normalized(q);
                let wj = r.ib.left - r.ia.left;
                UnitPoint {
                    left: (q.left - r.ia.left) / wj,
                    right: (q.right - r.ib.right) / wj,
                }
            }
            Kind::Inverse(inner) => inner.normalized_inverse(p),
            Kind::Interpolant { base, from, to } => {
                let y = p.to_line();
                let z = interpolant_inverse(base, *from, y);
                UnitPoint::from_line(z + to * base.displacement(z))
            }
        }
    }

    fn absolute_normalized<F: Fn(f64, f64) -> f64>(&self, inc: F, p: UnitPoint) -> UnitPoint {
        let len = self.domain.length();
        let len_j = self.image.length();
        UnitPoint {
            left: inc(self.domain.lo(), len * p.left) / len_j,
            right: -inc(self.domain.hi(), -len * p.right) / len_j,
        }
    }

    /// Inverse of [`normalized`](Self::normalized).
    pub fn normalized_inverse(&self, p: UnitPoint) -> UnitPoint {
        if p.left <= 0.0 || p.right <= 0.0 {
            return p;
        }
        match &self.kind {
            Kind::Affine => p,
            Kind::LinearFractional { shift } => {
                if *shift == 0.0 {
                    return p;
                }
                let k = (-shift).exp();
                let den = k * p.left + p.right;
                UnitPoint {
                    left: k * p.left / den,
                    right: p.right / den,
                }
            }
            Kind::ConstantNonlinearity { n } => {
                let big = n * self.domain.length();
                if big == 0.0 {
                    return p;
                }
                UnitPoint {
                    left: (p.left * big.exp_m1()).ln_1p() / big,
                    right: -(p.right * (-big).exp_m1()).ln_1p() / big,
                }
            }
            Kind::Composition(stages) => stages.iter().rev().fold(p, |q, s| s.normalized_inverse(q)),
            Kind::Inverse(inner) => inner.normalized(p),
            _ => {
                let target = p.to_line();
                match solve_increasing(|y| self.poincare_model(y), target, target) {
                    Some(y) => UnitPoint::from_line(y),
                    None => UnitPoint {
                        left: f64::NAN,
                        right: f64::NAN,
                    },
                }
            }
        }
    }

    /// Unchecked evaluation; exact at the domain endpoints.
    pub fn value(&self, x: f64) -> f64 {
        if x == self.domain.lo() {
            return self.image.lo();
        }
        if x == self.domain.hi() {
            return self.image.hi();
        }
        match &self.kind {
            Kind::PowerLaw { beta, offset } => power_value(*beta, *offset, x),
            Kind::SmoothSampled(m) => m.value(x),
            _ => self
                .normalized(UnitPoint::in_interval(&self.domain, x))
                .absolute(&self.image),
        }
    }

    /// `f(x + u) - f(x)` without cancellation for the closed-form kinds.
    pub fn increment(&self, x: f64, u: f64) -> f64 {
        let len = self.domain.length();
        let len_j = self.image.length();
        match &self.kind {
            Kind::Affine => u * len_j / len,
            Kind::LinearFractional { shift } => {
                let km = shift.exp_m1();
                let t = self.domain.normalize(x);
                let w = u / len;
                len_j * shift.exp() * w / ((1.0 + km * t) * (1.0 + km * (t + w)))
            }
            Kind::ConstantNonlinearity { n } => {
                let big = n * len;
                if big == 0.0 {
                    return u * len_j / len;
                }
                let t = self.domain.normalize(x);
                len_j * (big * t).exp() * (n * u).exp_m1() / big.exp_m1()
            }
            Kind::PowerLaw { beta, .. } => power_increment(*beta, x, u),
            Kind::SmoothSampled(m) => m.increment(x, u),
            _ => self.value(x + u) - self.value(x),
        }
    }

    /// Evaluation with a domain check.
    pub fn evaluate(&self, x: f64) -> Result<f64> {
        let tol = 1e-12 * self.domain.length();
        if !(x >= self.domain.lo() - tol && x <= self.domain.hi() + tol) {
            return Err(Error::OutOfDomain {
                x,
                lo: self.domain.lo(),
                hi: self.domain.hi(),
            });
        }
        Ok(self.value(x))
    }

    /// Preimage of a point of the image.
    pub fn preimage(&self, y: f64) -> f64 {
        if y == self.image.lo() {
            return self.domain.lo();
        }
        if y == self.image.hi() {
            return self.domain.hi();
        }
        self.normalized_inverse(UnitPoint::in_interval(&self.image, y))
            .absolute(&self.domain)
    }

    /// Derivatives of order 1, 2, 3 at `x`.
    pub fn derivatives(&self, x: f64) -> [f64; 3] {
        let len = self.domain.length();
        let scale = self.image.length() / len;
        match &self.kind {
            Kind::Affine => [scale, 0.0, 0.0],
            Kind::LinearFractional { shift } => {
                let t = self.domain.normalize(x);
                let k = shift.exp();
                let km = shift.exp_m1();
                let den = 1.0 + km * t;
                let g1 = k / (den * den);
                let g2 = -2.0 * km * g1 / den;
                let g3 = 6.0 * km * km * g1 / (den * den);
                [scale * g1, scale * g2 / len, scale * g3 / (len * len)]
            }
            Kind::ConstantNonlinearity { n } => {
                let big = n * len;
                if big == 0.0 {
                    return [scale, 0.0, 0.0];
                }
                let t = self.domain.normalize(x);
                let d1 = scale * big * (big * t).exp() / big.exp_m1();
                [d1, d1 * n, d1 * n * n]
            }
            Kind::PowerLaw { beta, .. } => {
                let b = *beta;
                let a = x.abs();
                let s = if x < 0.0 { -1.0 } else { 1.0 };
                [
                    b * a.powf(b - 1.0),
                    s * b * (b - 1.0) * a.powf(b - 2.0),
                    b * (b - 1.0) * (b - 2.0) * a.powf(b - 3.0),
                ]
            }
            Kind::SmoothSampled(m) => match (m.derivative(x, 1), m.derivative(x, 2), m.derivative(x, 3)) {
                (Some(a), Some(b), Some(c)) => [a, b, c],
                _ => fd_derivs(|p, u| m.increment(p, u), x, len),
            },
            Kind::Composition(stages) => {
                let mut acc = [1.0, 0.0, 0.0];
                let mut p = x;
                for s in stages.iter() {
                    let g = s.derivatives(p);
                    acc = [
                        g[0] * acc[0],
                        g[1] * acc[0] * acc[0] + g[0] * acc[1],
                        g[2] * acc[0] * acc[0] * acc[0] + 3.0 * g[1] * acc[0] * acc[1] + g[0] * acc[2],
                    ];
                    p = s.value(p);
                }
                acc
            }
            Kind::Restriction(r) => r.inner.derivatives(x),
            Kind::Inverse(inner) => {
                let f = inner.derivatives(self.value(x));
                let f1 = f[0];
                [
                    1.0 / f1,
                    -f[1] / (f1 * f1 * f1),
                    (3.0 * f[1] * f[1] - f1 * f[2]) / (f1 * f1 * f1 * f1 * f1),
                ]
            }
            Kind::Interpolant { .. } => {
                let h = len * 2e-4;
                let c = x.max(self.domain.lo() + h).min(self.domain.hi() - h);
                fd_derivs(|p, u| self.value(p + u) - self.value(p), c, len)
            }
        }
    }

    /// First derivative.
    pub fn derivative(&self, x: f64) -> f64 {
        self.derivatives(x)[0]
    }

    /// `f''/f'` at `x`.
    pub fn nonlinearity(&self, x: f64) -> Result<f64> {
        match self.kind {
            Kind::Affine => return Ok(0.0),
            Kind::ConstantNonlinearity { n } => return Ok(n),
            _ => {}
        }
        let d = self.derivatives(x);
        if !(d[0] > 0.0 && d[0].is_finite()) {
            return Err(Error::CriticalPoint { x });
        }
        Ok(d[1] / d[0])
    }

    /// `f'''/f' - 3/2 (f''/f')^2` at `x`.
    pub fn schwarzian(&self, x: f64) -> Result<f64> {
        match self.kind {
            Kind::Affine | Kind::LinearFractional { .. } => return Ok(0.0),
            Kind::ConstantNonlinearity { n } => return Ok(-0.5 * n * n),
            _ => {}
        }
        let d = self.derivatives(x);
        if !(d[0] > 0.0 && d[0].is_finite()) {
            return Err(Error::CriticalPoint { x });
        }
        let nl = d[1] / d[0];
        Ok(d[2] / d[0] - 1.5 * nl * nl)
    }

    /// `log f'(J.hi) - log f'(J.lo)`, the integral of the nonlinearity over `j`.
    pub fn nonlinearity_integral(&self, j: &Interval) -> Result<f64> {
        let tol = 1e-10 * self.domain.length();
        if !self.domain.contains_interval(j, tol) {
            return Err(Error::OutOfDomain {
                x: if j.lo() < self.domain.lo() { j.lo() } else { j.hi() },
                lo: self.domain.lo(),
                hi: self.domain.hi(),
            });
        }
        match &self.kind {
            Kind::Affine => Ok(0.0),
            Kind::LinearFractional { shift } if *shift == 0.0 => Ok(0.0),
            Kind::ConstantNonlinearity { n } => Ok(n * j.length()),
            Kind::Composition(stages) => {
                let mut total = 0.0;
                let mut cur = *j;
                for s in stages.iter() {
                    total += s.nonlinearity_integral(&cur)?;
                    cur = Interval::new(s.value(cur.lo()), s.value(cur.hi()))?;
                }
                Ok(total)
            }
            Kind::Inverse(inner) => {
                let pre = Interval::new(self.value(j.lo()), self.value(j.hi()))?;
                Ok(-inner.nonlinearity_integral(&pre)?)
            }
            Kind::PowerLaw { .. } if j.lo() <= 0.0 && j.hi() >= 0.0 => Err(Error::CriticalPoint { x: 0.0 }),
            _ => {
                for k in 0..=64 {
                    let x = j.lo() + j.length() * f64::from(k) / 64.0;
                    let d = self.derivative(x);
                    if !(d > 0.0 && d.is_finite()) {
                        return Err(Error::CriticalPoint { x });
                    }
                }
                Ok(self.derivative(j.hi()).ln() - self.derivative(j.lo()).ln())
            }
        }
    }

    /// The Poincare model map on the line.
    pub fn poincare_model(&self, y: f64) -> f64 {
        self.normalized(UnitPoint::from_line(y)).to_line()
    }

    /// Model value flagged when `|y|` exceeds the guarded range.
    pub fn poincare_model_guarded(&self, y: f64, grid: &GridSpec) -> Guarded {
        let b = grid.bound();
        let clamped = y.abs() > b;
        Guarded {
            value: self.poincare_model(y.max(-b).min(b)),
            clamped,
        }
    }

    /// Inverse of the Poincare model map.
    pub fn poincare_model_inverse(&self, y: f64) -> f64 {
        self.normalized_inverse(UnitPoint::from_line(y)).to_line()
    }

    /// `P(m)(y) - y`, computed without forming `y` twice.
    pub fn displacement(&self, y: f64) -> f64 {
        let p = UnitPoint::from_line(y);
        let q = self.normalized(p);
        (q.left / p.left).ln() - (q.right / p.right).ln()
    }

    /// `sup |P(m) - id|` on the guarded grid.
    pub fn distortion_norm(&self, grid: &GridSpec) -> SupEstimate {
        match self.kind {
            Kind::Affine => SupEstimate {
                value: 0.0,
                argmax: 0.0,
            },
            Kind::LinearFractional { shift } => SupEstimate {
                value: shift.abs(),
                argmax: 0.0,
            },
            _ => grid.sup_abs(|y| self.displacement(y)),
        }
    }

    /// `max log f' - min log f'` over `points` evenly spaced points of the closed domain.
    pub fn classical_distortion_norm(&self, points: usize) -> Result<f64> {
        let n = points.max(2);
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for k in 0..n {
            let x = self.domain.lo() + self.domain.length() * (k as f64) / ((n - 1) as f64);
            let d = self.derivative(x);
            if !(d > 0.0 && d.is_finite()) {
                return Err(Error::CriticalPoint { x });
            }
            let l = d.ln();
            lo = lo.min(l);
            hi = hi.max(l);
        }
        Ok(hi - lo)
    }

    /// `|m((x, y))| / |(x, y)|`.
    pub fn rho(&self, x: f64, y: f64) -> Result<f64> {
        if !(x < y) {
            return Err(Error::InvalidInterval { lo: x, hi: y });
        }
        self.evaluate(x)?;
        self.evaluate(y)?;
        Ok(self.increment(x, y - x) / (y - x))
    }

    /// Restriction to `sub`, specialized per kind so that precision survives.
    pub fn restrict(&self, sub: &Interval) -> Result<Self> {
        let tol = CHAIN_TOLERANCE * self.domain.length();
        if !self.domain.contains_interval(sub, tol) {
            return Err(Error::OutOfDomain {
                x: if sub.lo() < self.domain.lo() { sub.lo() } else { sub.hi() },
                lo: self.domain.lo(),
                hi: self.domain.hi(),
            });
        }
        if sub == &self.domain {
            return Ok(self.clone());
        }
        let image = Interval::new(self.value(sub.lo()), self.value(sub.hi()))?;
        match &self.kind {
            Kind::Affine => Ok(Self::affine(*sub, image)),
            Kind::LinearFractional { shift } => {
                let km = shift.exp_m1();
                let ta = self.domain.normalize(sub.lo());
                let tb = self.domain.normalize(sub.hi());
                let s = (km * tb).ln_1p() - (km * ta).ln_1p();
                Self::linear_fractional(*sub, image, s)
            }
            Kind::ConstantNonlinearity { n } => Self::constant_nonlinearity(*sub, image, *n),
            Kind::PowerLaw { .. } | Kind::SmoothSampled(_) => Ok(Self::raw(self.kind.clone(), *sub, image)),
            Kind::Composition(stages) => {
                let mut out = Vec::with_capacity(stages.len());
                let mut cur = *sub;
                for s in stages.iter() {
                    let r = s.restrict(&cur)?;
                    cur = r.image;
                    out.push(r);
                }
                Self::compose(out)
            }
            Kind::Inverse(inner) => Ok(inner.restrict(&image)?.inverse()),
            _ => Ok(Self::raw(
                Kind::Restriction(Box::new(Restricted {
                    inner: self.clone(),
                    a: UnitPoint::in_interval(&self.domain, sub.lo()),
                    b: UnitPoint::in_interval(&self.domain, sub.hi()),
                    ia: UnitPoint::in_interval(&self.image, image.lo()),
                    ib: UnitPoint::in_interval(&self.image, image.hi()),
                })),
                *sub,
                image,
            )),
        }
    }

    /// Koebe bounds on a grid of `points` interior points.
    ///
    /// A negative Schwarzian on the grid is reported through
    /// `precondition_ok`, never as an error.
    pub fn koebe_check(&self, points: usize) -> Result<KoebeReport> {
        let a = self.domain.lo();
        let d = self.domain.hi();
        let len = self.domain.length();
        let n = points.max(4);
        let mut min_s = f64::INFINITY;
        let mut pointwise: f64 = 0.0;
        let mut logd = Vec::with_capacity(n);
        let mut xs = Vec::with_capacity(n);
        for k in 1..=n {
            let x = a + len * (k as f64) / ((n + 1) as f64);
            let der = self.derivatives(x);
            if !(der[0] > 0.0) {
                return Err(Error::CriticalPoint { x });
            }
            let nl = der[1] / der[0];
            min_s = min_s.min(der[2] / der[0] - 1.5 * nl * nl);
            pointwise = pointwise.max(nl.abs() * (x - a).min(d - x) / 2.0);
            xs.push(x);
            logd.push(der[0].ln());
        }
        let stride = (n / 64).max(1);
        let mut integrated: f64 = 0.0;
        for i in (0..n).step_by(stride) {
            for j in ((i + 1)..n).step_by(stride) {
                let (y, z) = (xs[i], xs[j]);
                let lcr = ((y - a) * (d - z)).ln() - ((z - a) * (d - y)).ln();
                let lhs = (logd[i] - logd[j]).abs();
                integrated = integrated.max(lhs / (2.0 * lcr.abs()));
            }
        }
        let scale = 1.0 / (len * len);
        Ok(KoebeReport {
            precondition_ok: min_s >= -1e-7 * scale,
            min_schwarzian: min_s,
            pointwise_ratio: pointwise,
            integrated_ratio: integrated,
            points: n,
        })
    }
}

fn interpolant_inverse(base: &MapDescriptor, from: f64, y: f64) -> f64 {
    if from == 0.0 {
        return y;
    }
    solve_increasing(|z| z + from * base.displacement(z), y, y).unwrap_or(f64::NAN)
}

/// Affine map from `i` onto `(0, 1)`.
pub fn affine_normalizer(i: Interval) -> MapDescriptor {
    MapDescriptor::affine(i, Interval::unit())
}
