//! Comparisons against independent closed forms (statrs supplies Gamma and erfc).

use std::f64::consts::PI;

use approx::assert_relative_eq;
use statrs::function::erf::erfc;
use statrs::function::gamma::gamma;
use vtheat_core::weber::weber_at_zero;
use vtheat_core::{
    temperature_on_axis, temperature_stieltjes, weber_asymptotic, weber_integral, Atoms,
    CountingFunction, EvalParams, FieldPoint, PowerLaw, RayGeometry, WeberMethod, WeberQuery,
};

/// u(0, t) for the density a0 s^alpha: a0 / (4 pi tau) * (4 tau)^((alpha+1)/2) Gamma((alpha+1)/2) / 2.
fn origin_oracle(a0: f64, alpha: f64, tau: f64) -> f64 {
    a0 / (4.0 * PI * tau) * 0.5 * (4.0 * tau).powf(0.5 * (alpha + 1.0)) * gamma(0.5 * (alpha + 1.0))
}

#[test]
fn origin_value_matches_gamma() {
    let p = EvalParams::default();
    for alpha in [-0.999, -0.9, -0.5, 0.0, 0.5, 1.0, 2.0, 3.7] {
        for t in [0.01, 1.0, 25.0] {
            let n: CountingFunction = PowerLaw::density(2.5, alpha).unwrap().into();
            let u = temperature_on_axis(&n, t, &p).unwrap().to_f64();
            assert_relative_eq!(u, origin_oracle(2.5, alpha, t), max_relative = 1e-8);
        }
    }
}

#[test]
fn origin_value_independent_of_ray_direction() {
    let p = EvalParams::default();
    let n: CountingFunction = PowerLaw::density(1.0, 0.5).unwrap().into();
    for theta0 in [0.0, 1.0, -2.5, PI] {
        let ray = RayGeometry::new(theta0).unwrap();
        let u = temperature_stieltjes(&n, &ray, &FieldPoint::origin(), 0.5, &p).unwrap();
        assert_relative_eq!(
            u.to_f64(),
            origin_oracle(1.0, 0.5, 0.5),
            max_relative = 1e-9
        );
    }
}

#[test]
fn d_minus_one_is_scaled_erfc() {
    for k in -16..=16 {
        let z = 0.5 * k as f64;
        let q = WeberQuery::new(-1.0, z).with_method(WeberMethod::Integral);
        let d = weber_integral(&q).unwrap().to_f64();
        let oracle = (0.25 * z * z).exp() * (0.5 * PI).sqrt() * erfc(z / 2f64.sqrt());
        assert_relative_eq!(d, oracle, max_relative = 1e-8);
    }
}

#[test]
fn weber_at_origin_matches_gamma() {
    for nu in [-0.25, -0.5, -1.0, -1.5, -2.0, -3.3] {
        let exact = 2f64.powf(0.5 * nu) * PI.sqrt() / gamma(0.5 * (1.0 - nu));
        let q = WeberQuery::new(nu, 0.0).with_method(WeberMethod::Integral);
        assert_relative_eq!(
            weber_integral(&q).unwrap().to_f64(),
            exact,
            max_relative = 1e-9
        );
        assert_relative_eq!(weber_at_zero(nu).to_f64(), exact, max_relative = 1e-12);
    }
}

#[test]
fn d_minus_two_recurrence() {
    // D_{nu+1} - z D_nu + nu D_{nu-1} = 0 with nu = -1:  D_0 = exp(-z^2/4).
    for z in [-3.0, -1.0, 0.0, 0.7, 2.0, 6.0] {
        let d = |nu: f64| {
            weber_integral(&WeberQuery::new(nu, z).with_method(WeberMethod::Integral))
                .unwrap()
                .to_f64()
        };
        let d0 = (-0.25 * z * z).exp();
        assert_relative_eq!(
            d0,
            z * d(-1.0) + d(-2.0),
            max_relative = 1e-8,
            epsilon = 1e-300
        );
    }
}

#[test]
fn series_error_estimate_is_honest() {
    for nu in [-0.5, -1.5, -2.5] {
        for z in [6.0, 8.0, 12.0] {
            let exact = weber_integral(&WeberQuery::new(nu, z)).unwrap();
            for n_max in 1..6 {
                let s = weber_asymptotic(&WeberQuery::new(nu, z), n_max).unwrap();
                let err = s.value.rel_diff(exact).abs();
                assert!(
                    err <= s.trunc_error_estimate + 1e-12,
                    "nu={nu} z={z} N={n_max}: error {err:e} vs estimate {:e}",
                    s.trunc_error_estimate
                );
            }
        }
    }
}

#[test]
fn dense_atoms_approach_the_density() {
    // midpoint atoms of the density 2s on [0, 12]; the Gaussian factor kills the rest
    let p = EvalParams::default();
    let ray = RayGeometry::new(0.4).unwrap();
    let x = FieldPoint::at_offset(1.5, &ray, 0.6).unwrap();
    let exact = temperature_stieltjes(
        &PowerLaw::density(2.0, 1.0).unwrap().into(),
        &ray,
        &x,
        1.0,
        &p,
    )
    .unwrap()
    .to_f64();
    let mut last = f64::INFINITY;
    for cells in [50usize, 100, 200, 400] {
        let h = 12.0 / cells as f64;
        let atoms: Vec<(f64, f64)> = (0..cells)
            .map(|i| {
                let s = (i as f64 + 0.5) * h;
                (s, 2.0 * s * h)
            })
            .collect();
        let n: CountingFunction = Atoms::new(atoms).unwrap().into();
        let err = (temperature_stieltjes(&n, &ray, &x, 1.0, &p)
            .unwrap()
            .to_f64()
            / exact
            - 1.0)
            .abs();
        assert!(
            err < last * 0.3,
            "cells={cells} error {err:e} after {last:e}"
        );
        last = err;
    }
    assert!(last < 1e-4);
}

#[test]
fn local_gamma_matches_statrs() {
    // statrs itself is good to about 1.2e-13 here (checked at x = 12.2)
    for k in 1..300 {
        let x = 0.1 * k as f64;
        assert_relative_eq!(
            vtheat_core::special::gamma(x),
            gamma(x),
            max_relative = 5e-13
        );
        assert_relative_eq!(
            vtheat_core::special::ln_gamma(x),
            statrs::function::gamma::ln_gamma(x),
            max_relative = 1e-12,
            epsilon = 1e-13
        );
    }
}

#[test]
fn scaled_i0_matches_its_power_series() {
    // I0(x) = sum (x/2)^(2k) / (k!)^2
    for x in [0.0, 0.5, 3.0, 7.5, 15.0, 30.0] {
        let (mut term, mut sum) = (1.0f64, 1.0f64);
        for k in 1..200 {
            term *= (0.5 * x) * (0.5 * x) / (k * k) as f64;
            sum += term;
        }
        assert_relative_eq!(
            vtheat_core::special::bessel_i0e(x),
            sum * (-x).exp(),
            max_relative = 1e-12
        );
    }
}
