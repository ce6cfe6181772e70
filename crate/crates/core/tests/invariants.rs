use std::f64::consts::PI;

use proptest::prelude::*;
use vtheat_core::measure::Mode;
use vtheat_core::{
    disk_mass, segment_mean, temperature_parts, temperature_stieltjes, Atoms, CountingFunction,
    EvalParams, FieldPoint, LogSum, LogValue, Piecewise, PowerLaw, RayGeometry, RayTemperature,
};

fn cases() -> ProptestConfig {
    ProptestConfig::with_cases(48)
}

proptest! {
    #![proptest_config(cases())]

    #[test]
    fn counting_function_is_nondecreasing(
        a0 in 0.1f64..10.0, alpha in 0.05f64..4.0, s0 in 0.0f64..3.0,
        s in 0.0f64..50.0, ds in 0.0f64..10.0,
    ) {
        let n: CountingFunction = PowerLaw::new(a0, alpha, s0, Mode::Counting).unwrap().into();
        prop_assert!(n.eval(s + ds) >= n.eval(s));
        prop_assert!(n.eval_left(s) <= n.eval(s));
    }

    #[test]
    fn density_and_counting_modes_agree(
        alpha in -0.8f64..3.0, r in 0.0f64..30.0, delta in 0.0f64..PI, t in 0.2f64..4.0,
    ) {
        // a0 s^alpha ds has counting function a0/(alpha+1) s^(alpha+1)
        let p = EvalParams::default();
        let ray = RayGeometry::new(0.9).unwrap();
        let x = FieldPoint::at_offset(r, &ray, delta).unwrap();
        let d: CountingFunction = PowerLaw::density(1.0, alpha).unwrap().into();
        let c: CountingFunction =
            PowerLaw::new(1.0 / (alpha + 1.0), alpha + 1.0, 0.0, Mode::Counting).unwrap().into();
        let ud = temperature_stieltjes(&d, &ray, &x, t, &p).unwrap();
        let uc = temperature_stieltjes(&c, &ray, &x, t, &p).unwrap();
        prop_assert!(ud.rel_diff(uc).abs() < 1e-8, "{:?} vs {:?}", ud, uc);
    }

    #[test]
    fn temperature_is_positive_and_both_forms_agree(
        alpha in -0.5f64..3.0, r in 0.0f64..40.0, theta in -PI..PI, t in 0.05f64..5.0,
    ) {
        let p = EvalParams::default();
        let ray = RayGeometry::new(0.3).unwrap();
        let x = FieldPoint::new(r, theta).unwrap();
        let n: CountingFunction = PowerLaw::density(1.0, alpha).unwrap().into();
        let a = temperature_stieltjes(&n, &ray, &x, t, &p).unwrap();
        let b = temperature_parts(&n, &ray, &x, t, &p).unwrap();
        prop_assert_eq!(a.sign(), 1);
        prop_assert!(a.rel_diff(b).abs() < 1e-8);
    }

    #[test]
    fn temperature_is_linear_in_the_measure(
        m1 in 0.1f64..5.0, m2 in 0.1f64..5.0, s1 in 0.01f64..10.0, gap in 0.0f64..5.0,
        c in 0.1f64..10.0, r in 0.0f64..10.0, theta in -PI..PI,
    ) {
        let p = EvalParams::default();
        let ray = RayGeometry::default();
        let x = FieldPoint::new(r, theta).unwrap();
        let s2 = s1 + gap;
        let u = |atoms: Vec<(f64, f64)>| {
            let n: CountingFunction = Atoms::new(atoms).unwrap().into();
            temperature_stieltjes(&n, &ray, &x, 0.7, &p).unwrap()
        };
        let mut sum = LogSum::new();
        sum.push(u(vec![(s1, m1)]));
        sum.push(u(vec![(s2, m2)]));
        let joint = if s1 == s2 { vec![(s1, m1 + m2)] } else { vec![(s1, m1), (s2, m2)] };
        prop_assert!(u(joint).rel_diff(sum.value()).abs() < 1e-12);
        let scaled = u(vec![(s1, c * m1)]);
        prop_assert!(scaled.rel_diff(u(vec![(s1, m1)]).scale_log(c.ln())).abs() < 1e-12);
    }

    #[test]
    fn ratios_do_not_depend_on_a0(
        a0 in 0.01f64..100.0, alpha in 0.0f64..3.0, r in 0.0f64..30.0, delta in 0.0f64..PI,
    ) {
        let p = EvalParams::default();
        let ray = RayGeometry::default();
        let x = FieldPoint::at_offset(r, &ray, delta).unwrap();
        let y = FieldPoint::at_offset(r + 1.0, &ray, delta).unwrap();
        let u = |a: f64, x: &FieldPoint| {
            let n: CountingFunction = PowerLaw::density(a, alpha).unwrap().into();
            temperature_stieltjes(&n, &ray, x, 1.0, &p).unwrap().log_mag()
        };
        let ratio_a = u(a0, &x) - u(a0, &y);
        let ratio_1 = u(1.0, &x) - u(1.0, &y);
        prop_assert!((ratio_a - ratio_1).abs() < 1e-9 * (1.0 + ratio_1.abs()));
    }

    #[test]
    fn log_sum_matches_direct_addition(xs in prop::collection::vec(-1e3f64..1e3, 1..20)) {
        let mut s = LogSum::new();
        for &x in &xs {
            s.push(LogValue::from_f64(x));
        }
        let direct: f64 = xs.iter().sum();
        let scale: f64 = xs.iter().map(|x| x.abs()).sum();
        prop_assert!((s.value().to_f64() - direct).abs() <= 1e-12 * scale);
    }

    #[test]
    fn segment_mean_is_linear(
        a in -5.0f64..5.0, b in -5.0f64..5.0, at in 0.5f64..5.0,
        l in -3.0f64..3.0, rgt in -3.0f64..3.0, x in 0.0f64..6.0,
    ) {
        let f = Piecewise::Step { at, left: l, right: rgt };
        let g = Piecewise::Power { coeff: 1.0, exponent: 1.5 };
        let h = Piecewise::Combination(vec![(a, f.clone()), (b, g.clone())]);
        let lhs = segment_mean(&h, x);
        let rhs = a * segment_mean(&f, x) + b * segment_mean(&g, x);
        prop_assert!((lhs - rhs).abs() < 1e-12 * (1.0 + lhs.abs()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn disk_mass_grows_with_radius(alpha in 0.0f64..2.5, r in 0.5f64..6.0, dr in 0.1f64..3.0, t in 0.01f64..0.5) {
        let p = EvalParams::default();
        let n: CountingFunction = PowerLaw::density(1.0, alpha).unwrap().into();
        let u = RayTemperature::new(n, RayGeometry::new(1.3).unwrap(), p);
        let inner = disk_mass(&u, r, t, &p).unwrap();
        let outer = disk_mass(&u, r + dr, t, &p).unwrap();
        prop_assert!(inner > 0.0);
        prop_assert!(outer >= inner);
    }
}
