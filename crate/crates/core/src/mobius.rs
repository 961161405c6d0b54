//! Real Mobius maps `x -> (a x + b) / (c x + d)`.

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::map::MapDescriptor;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mobius {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl Mobius {
    pub const IDENTITY: Mobius = Mobius {
        a: 1.0,
        b: 0.0,
        c: 0.0,
        d: 1.0,
    };

    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        Self { a, b, c, d }
    }

    /// The map sending `x1, x2, x3` to `0, 1, infinity`.
    pub fn to_standard(x: [f64; 3]) -> Self {
        let [x1, x2, x3] = x;
        Self {
            a: x2 - x3,
            b: -x1 * (x2 - x3),
            c: x2 - x1,
            d: -x3 * (x2 - x1),
        }
    }

    /// The unique map sending `x[i]` to `y[i]`.
    pub fn through_points(x: [f64; 3], y: [f64; 3]) -> Self {
        Self::to_standard(y).inverse().compose(&Self::to_standard(x))
    }

    pub fn determinant(&self) -> f64 {
        self.a * self.d - self.b * self.c
    }

    pub fn inverse(&self) -> Self {
        Self {
            a: self.d,
            b: -self.b,
            c: -self.c,
            d: self.a,
        }
    }

    /// `self o other`.
    pub fn compose(&self, other: &Mobius) -> Self {
        Self {
            a: self.a * other.a + self.b * other.c,
            b: self.a * other.b + self.b * other.d,
            c: self.c * other.a + self.d * other.c,
            d: self.c * other.b + self.d * other.d,
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        (self.a * x + self.b) / (self.c * x + self.d)
    }

    pub fn derivative(&self, x: f64) -> f64 {
        let den = self.c * x + self.d;
        self.determinant() / (den * den)
    }

    /// The pole, if the map is not affine.
    pub fn pole(&self) -> Option<f64> {
        if self.c == 0.0 {
            None
        } else {
            Some(-self.d / self.c)
        }
    }

    /// Whether the map is finite and increasing on the closed interval.
    pub fn is_increasing_on(&self, i: &Interval) -> bool {
        let pole_outside = self.pole().map_or(true, |p| !i.contains(p));
        pole_outside && self.determinant() > 0.0
    }

    /// The descriptor of this map on `domain`.
    pub fn descriptor(&self, domain: Interval) -> Result<MapDescriptor> {
        if !self.is_increasing_on(&domain) {
            return Err(Error::InvalidParameter("Mobius map is not increasing on the domain"));
        }
        let image = Interval::new(self.eval(domain.lo()), self.eval(domain.hi()))?;
        let shift = (self.derivative(domain.lo()) * domain.length() / image.length()).ln();
        MapDescriptor::linear_fractional(domain, image, shift)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_point_interpolation() {
        let m = Mobius::through_points([0.0, 1.0, 3.0], [1.0, 2.0, 7.0]);
        assert!((m.eval(0.0) - 1.0).abs() < 1e-14);
        assert!((m.eval(1.0) - 2.0).abs() < 1e-14);
        assert!((m.eval(3.0) - 7.0).abs() < 1e-13);
    }

    #[test]
    fn descriptor_agrees_with_direct_evaluation() {
        let m = Mobius::new(2.0, 1.0, 1.0, 3.0);
        let d = m.descriptor(Interval::new(0.0, 2.0).unwrap()).unwrap();
        for &x in &[0.1, 0.7, 1.5] {
            assert!((d.value(x) - m.eval(x)).abs() < 1e-14);
        }
        assert!(Mobius::new(1.0, 0.0, 1.0, -1.0)
            .descriptor(Interval::new(0.0, 2.0).unwrap())
            .is_err());
    }
}
