//! Guarded grids on the Poincare line and sup-norm estimation.

use alloc::vec::Vec;

use crate::interval::{guarded_line_bound, DEFAULT_EPS_GUARD};

/// Grid parameters recorded alongside every sup-norm estimate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    pub points: usize,
    pub refine: usize,
    pub eps_guard: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            points: 4096,
            refine: 64,
            eps_guard: DEFAULT_EPS_GUARD,
        }
    }
}

/// A sup estimate together with where it was attained.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SupEstimate {
    pub value: f64,
    pub argmax: f64,
}

impl GridSpec {
    pub fn with_points(points: usize) -> Self {
        Self {
            points,
            ..Self::default()
        }
    }

    pub fn bound(&self) -> f64 {
        guarded_line_bound(self.eps_guard)
    }

    /// Uniform points on the guarded line.
    pub fn line_points(&self) -> Vec<f64> {
        let n = self.points.max(2);
        let b = self.bound();
        (0..n)
            .map(|k| -b + 2.0 * b * (k as f64) / ((n - 1) as f64))
            .collect()
    }

    /// Sup of `|f|` over the grid with one refinement pass around the argmax.
    /// Non-finite values propagate as an infinite sup.
    pub fn sup_abs<F: FnMut(f64) -> f64>(&self, mut f: F) -> SupEstimate {
        let pts = self.line_points();
        let mut best = SupEstimate {
            value: 0.0,
            argmax: 0.0,
        };
        let mut best_k = 0;
        for (k, &y) in pts.iter().enumerate() {
            let v = f(y).abs();
            if !v.is_finite() {
                return SupEstimate {
                    value: f64::INFINITY,
                    argmax: y,
                };
            }
            if v > best.value {
                best = SupEstimate { value: v, argmax: y };
                best_k = k;
            }
        }
        let lo = pts[best_k.saturating_sub(1)];
        let hi = pts[(best_k + 1).min(pts.len() - 1)];
        for k in 1..=self.refine {
            let y = lo + (hi - lo) * (k as f64) / ((self.refine + 1) as f64);
            let v = f(y).abs();
            if v > best.value {
                best = SupEstimate { value: v, argmax: y };
            }
        }
        best
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_is_symmetric_and_guarded() {
        let g = GridSpec::with_points(5);
        let p = g.line_points();
        assert_eq!(p.len(), 5);
        assert!((p[0] + p[4]).abs() < 1e-15);
        assert_eq!(p[2], 0.0);
    }

    #[test]
    fn refinement_finds_peak_between_nodes() {
        let g = GridSpec::with_points(16);
        let peak = 0.123;
        let s = g.sup_abs(|y| 1.0 / (1.0 + 100.0 * (y - peak) * (y - peak)));
        assert!(s.value > 0.8);
        assert!((s.argmax - peak).abs() < 0.2);
    }
}
