//! Geometric decay fits `y = K1 * K2^x` and `y = K1 * K2^sqrt(x)`.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DecayModel {
    Exponential,
    ExponentialSqrt,
}

impl DecayModel {
    fn transform(self, x: f64) -> f64 {
        match self {
            DecayModel::Exponential => x,
            DecayModel::ExponentialSqrt => x.sqrt(),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            DecayModel::Exponential => "exp",
            DecayModel::ExponentialSqrt => "exp-sqrt",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DecayFit {
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    pub model: DecayModel,
    pub k1: f64,
    pub k2: f64,
    /// Root mean square of the residuals of `ln y`.
    pub residual: f64,
}

impl DecayFit {
    /// Least squares on `ln y`; needs two points with distinct `x` and
    /// positive `y`.
    pub fn fit(xs: &[f64], ys: &[f64], model: DecayModel) -> Result<Self> {
        let pts: Vec<(f64, f64)> = xs
            .iter()
            .zip(ys)
            .filter(|(_, &y)| y > 0.0 && y.is_finite())
            .map(|(&x, &y)| (model.transform(x), y.ln()))
            .collect();
        if pts.len() < 2 || pts.len() != xs.len() {
            return Err(Error::FitUnderdetermined);
        }
        let n = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
        if sxx <= 0.0 {
            return Err(Error::FitUnderdetermined);
        }
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let slope = sxy / sxx;
        let intercept = my - slope * mx;
        let sse: f64 = pts.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
        Ok(Self {
            xs: xs.to_vec(),
            ys: ys.to_vec(),
            model,
            k1: intercept.exp(),
            k2: slope.exp(),
            residual: (sse / n).sqrt(),
        })
    }

    /// `K2 < 1` with residual at most `max_residual`.
    pub fn passes(&self, max_residual: f64) -> bool {
        self.k2 < 1.0 && self.residual <= max_residual
    }

    pub fn predict(&self, x: f64) -> f64 {
        self.k1 * self.k2.powf(self.model.transform(x))
    }
}

/// Strictly decreasing sequence.
pub fn strictly_decreasing(ys: &[f64]) -> bool {
    ys.windows(2).all(|w| w[1] < w[0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn recovers_exact_models() {
        let xs = vec![1.0, 2.0, 3.0, 4.0, 5.0];
        let ys: Vec<f64> = xs.iter().map(|x: &f64| 3.0 * 0.5f64.powf(*x)).collect();
        let f = DecayFit::fit(&xs, &ys, DecayModel::Exponential).unwrap();
        assert!((f.k1 - 3.0).abs() < 1e-12 && (f.k2 - 0.5).abs() < 1e-12 && f.residual < 1e-12);
        let ys: Vec<f64> = xs.iter().map(|x: &f64| 2.0 * 0.3f64.powf(x.sqrt())).collect();
        let f = DecayFit::fit(&xs, &ys, DecayModel::ExponentialSqrt).unwrap();
        assert!((f.k2 - 0.3).abs() < 1e-12 && f.passes(1e-9));
        assert!((f.predict(4.0) - 2.0 * 0.09).abs() < 1e-12);
    }

    #[test]
    fn underdetermined_fits() {
        assert_eq!(DecayFit::fit(&[1.0], &[1.0], DecayModel::Exponential), Err(Error::FitUnderdetermined));
        assert_eq!(DecayFit::fit(&[1.0, 2.0], &[1.0, 0.0], DecayModel::Exponential), Err(Error::FitUnderdetermined));
        assert_eq!(DecayFit::fit(&[1.0, 1.0], &[1.0, 2.0], DecayModel::Exponential), Err(Error::FitUnderdetermined));
    }

    #[test]
    fn decreasing() {
        assert!(strictly_decreasing(&[3.0, 2.0, 1.0]));
        assert!(!strictly_decreasing(&[3.0, 3.0, 1.0]));
    }
}
