use proptest::prelude::*;

use poincare::interval::{
    cross_ratio_cr, poincare_coordinate, poincare_distance, Interval, PointQuadruple,
};
use poincare::mobius::Mobius;

fn sorted4(mut v: [f64; 4]) -> [f64; 4] {
    v.sort_by(|a, b| a.total_cmp(b));
    v
}

proptest! {
    #[test]
    fn cross_ratio_is_mobius_invariant(
        pts in prop::array::uniform4(0.0f64..1.0),
        pole_gap in 0.1f64..5.0,
        a in -2.0f64..2.0,
        b in 0.1f64..3.0,
        left in any::<bool>(),
    ) {
        let p = sorted4(pts);
        // relative rounding of the gaps stays far below 1e-12 at this spacing
        prop_assume!(p.windows(2).all(|w| w[1] - w[0] > 1e-3));
        let q = PointQuadruple::new(p[0], p[1], p[2], p[3]).unwrap();
        let pole = if left { -pole_gap } else { 1.0 + pole_gap };
        // x -> a - b / (x - pole), increasing away from the pole
        let g = Mobius::new(a, -a * pole - b, 1.0, -pole);
        let y = p.map(|x| g.eval(x));
        // image gaps must be resolvable to 1e-12 relative in double precision
        let scale = y.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        prop_assume!(y.windows(2).all(|w| w[1] - w[0] > 1e-2 * scale));
        let img = PointQuadruple::new(y[0], y[1], y[2], y[3]).unwrap();
        let (before, after) = (cross_ratio_cr(&q), cross_ratio_cr(&img));
        prop_assert!((before - after).abs() <= 1e-12 * before, "{before} {after}");
    }

    #[test]
    fn coordinate_is_increasing(lo in -5.0f64..5.0, len in 0.01f64..10.0, n in 3usize..200) {
        let i = Interval::new(lo, lo + len).unwrap();
        let ys: Vec<f64> = (1..n).map(|k| poincare_coordinate(&i, i.denormalize(k as f64 / n as f64)).unwrap()).collect();
        prop_assert!(ys.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn distance_is_additive(lo in -5.0f64..5.0, len in 0.01f64..10.0, t in prop::array::uniform3(0.001f64..0.999)) {
        let i = Interval::new(lo, lo + len).unwrap();
        let mut t = t;
        t.sort_by(|a, b| a.total_cmp(b));
        let [x, y, z] = t.map(|s| i.denormalize(s));
        let lhs = poincare_distance(&i, x, z).unwrap();
        let rhs = poincare_distance(&i, x, y).unwrap() + poincare_distance(&i, y, z).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + lhs));
    }

    #[test]
    fn coordinate_is_affine_covariant(lo in -50.0f64..50.0, len in 0.001f64..100.0, t in 0.0001f64..0.9999) {
        let i = Interval::new(lo, lo + len).unwrap();
        let x = i.denormalize(t);
        let a = poincare_coordinate(&i, x).unwrap();
        let b = poincare_coordinate(&Interval::unit(), i.normalize(x)).unwrap();
        prop_assert!((a - b).abs() <= 1e-9 * (1.0 + a.abs()));
    }
}
