use std::sync::{Arc, OnceLock};

use proptest::prelude::*;

use poincare::circle::{
    arc_contains, dynamical_partition, find_parameter, rotation_number, symmetric_neighborhood, Arnold, CircleLift,
    ContinuedFraction, ElementKind, Rigid,
};
use poincare::experiments::{
    approximate, density_profile, h_prescription, inverse_decomposition, standard_chain, DecayFit, DecayModel,
};
use poincare::cancellation::delta_max;
use poincare::error::Error;

fn golden() -> &'static (Arc<dyn CircleLift>, ContinuedFraction) {
    static CELL: OnceLock<(Arc<dyn CircleLift>, ContinuedFraction)> = OnceLock::new();
    CELL.get_or_init(|| {
        let target = poincare::circle::golden_prefix(14);
        let w = find_parameter(|w| Arnold { omega: w }, 0.55, 0.65, 0, &target).unwrap();
        let f: Arc<dyn CircleLift> = Arc::new(Arnold { omega: w });
        let cf = rotation_number(f.as_ref(), 14).unwrap().cf;
        (f, cf)
    })
}

fn fibonacci(n: usize) -> u64 {
    let (mut a, mut b) = (1u64, 1u64);
    for _ in 0..n {
        (a, b) = (b, a + b);
    }
    a
}

fn check_partitions(f: &dyn CircleLift, cf: &ContinuedFraction, max_k: usize) -> Result<(), TestCaseError> {
    let mut prev = None;
    for k in 1..=max_k {
        let d = dynamical_partition(f, cf, k).unwrap();
        prop_assert!((d.total_length() - 1.0).abs() <= 1e-8);
        if let Some(p) = &prev {
            let p: &poincare::circle::DynamicalPartition = p;
            for e in p.elements.iter().filter(|e| e.kind == ElementKind::Lengthy) {
                let inside: Vec<_> = d
                    .elements
                    .iter()
                    .filter(|x| arc_contains(&e.interval, &x.interval, 1e-12))
                    .collect();
                prop_assert_eq!(inside.iter().filter(|x| x.kind == ElementKind::Short).count(), 1);
                prop_assert_eq!((inside.len() - 1) as u64, cf.a[k - 1]);
            }
        }
        prev = Some(d);
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn rigid_rotations_tile_and_grow(omega in 0.05f64..0.95) {
        let f = Rigid { omega };
        let report = rotation_number(&f, 8);
        // rationals and huge quotients stop the expansion early
        prop_assume!(report.is_ok());
        let cf = report.unwrap().cf;
        prop_assume!(cf.q.last().copied().unwrap_or(u64::MAX) < 5_000);
        for (n, &q) in cf.q.iter().enumerate() {
            prop_assert!(q >= fibonacci(n));
        }
        prop_assert!((cf.value() - omega).abs() <= 1.0 / (cf.q[cf.depth()] as f64).powi(2) + 1e-12);
        check_partitions(&f, &cf, cf.depth().min(7))?;
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 8, ..ProptestConfig::default() })]

    #[test]
    fn arnold_parameter_search_realizes_quotients(target in prop::collection::vec(1u64..4, 6)) {
        let w = find_parameter(|w| Arnold { omega: w }, 0.0, 1.0, 0, &target);
        prop_assume!(!matches!(w, Err(Error::PrefixUnreachable)));
        let f = Arnold { omega: w.unwrap() };
        let cf = rotation_number(&f, target.len()).unwrap().cf;
        prop_assert_eq!(&cf.a[..target.len()], &target[..]);
        check_partitions(&f, &cf, 5)?;
    }

    #[test]
    fn prescription_matches_log_derivative(lambda in 2usize..5, extra in 1usize..4) {
        let (f, cf) = golden();
        let kappa = lambda + extra;
        let u = symmetric_neighborhood(f.as_ref(), cf, lambda).unwrap();
        let chain = standard_chain(f, cf, kappa).unwrap();
        let approx = approximate(f.as_ref(), &chain, &u.interval).unwrap();
        let d = inverse_decomposition(&approx).unwrap();
        let mut expected = Vec::new();
        for (i, iv) in chain.intervals[..chain.m()].iter().enumerate().rev() {
            let kept = approx.kept[i];
            if kept {
                expected.push(0.0);
            } else {
                // the inverse stage moves by +1/2 of the log-derivative jump
                let jump = f.derivative(iv.hi(), 1).ln() - f.derivative(iv.lo(), 1).ln();
                expected.push(0.5 * jump);
            }
        }
        prop_assert_eq!(d.deltas().len(), expected.len());
        for (a, b) in d.deltas().iter().zip(&expected) {
            prop_assert!((a - b).abs() <= 1e-12, "{a} {b}");
        }
        prop_assert!((delta_max(&d) - poincare::cancellation::delta_max_of(&expected)).abs() <= 1e-10);
        // the prescription splits a stage exactly
        let stage = chain.stages[0].clone();
        let (h, g) = h_prescription(&stage).unwrap();
        let recomposed = poincare::map::MapDescriptor::compose(vec![g, h]).unwrap();
        for k in 1..20 {
            let x = stage.domain().denormalize(k as f64 / 20.0);
            prop_assert!((recomposed.value(x) - stage.value(x)).abs() <= 1e-9);
        }
    }

    #[test]
    fn densities_obey_the_tower_property(lambda in 2usize..5, extra in 2usize..6, pick in any::<prop::sample::Index>()) {
        let (f, cf) = golden();
        let kappa = lambda + extra;
        let j = lambda + 1 + pick.index(extra - 1);
        let u = symmetric_neighborhood(f.as_ref(), cf, lambda).unwrap();
        let chain = standard_chain(f, cf, kappa).unwrap();
        let approx = approximate(f.as_ref(), &chain, &u.interval).unwrap();
        let d = dynamical_partition(f.as_ref(), cf, j).unwrap();
        let p = density_profile(&approx, &d).unwrap();
        prop_assert!((p.tower_mean() - p.mean).abs() <= 1e-10);
        prop_assert!(p.values.iter().all(|v| (-1e-12..=1.0 + 1e-12).contains(&v.density)));
        prop_assert!(p.v_j >= 0.0);
    }
}

proptest! {
    #[test]
    fn fits_recover_exact_decay(k1 in 0.01f64..100.0, k2 in 0.05f64..0.99, n in 2usize..10, sqrt in any::<bool>()) {
        let model = if sqrt { DecayModel::ExponentialSqrt } else { DecayModel::Exponential };
        let xs: Vec<f64> = (1..=n).map(|x| x as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|&x| k1 * k2.powf(if sqrt { x.sqrt() } else { x })).collect();
        let fit = DecayFit::fit(&xs, &ys, model).unwrap();
        prop_assert!((fit.k2 - k2).abs() <= 1e-9 * (1.0 + k2));
        prop_assert!((fit.k1 - k1).abs() <= 1e-8 * k1);
        prop_assert!(fit.residual <= 1e-9);
    }
}
