//! Reduced-density run of the invariant suites.
//!
//! `--inject` plants a known defect so the suites can be shown to catch it:
//! `wrong-constant` swaps in the misprinted forward-regime constant,
//! `linear-accumulation` round-trips temperatures through plain binary64.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use vtheat_core::asymptotics::{asym_log_in, constant_audit, SweepRow, DEFAULT_EPS_DELTA};
use vtheat_core::measure::{tail_condition_check_log, Atoms, CountingFunction, Mode};
use vtheat_core::special::ln_gamma;
use vtheat_core::tauberian::{recover, RecoverySpec};
use vtheat_core::weber::weber_at_zero;
use vtheat_core::{
    angular_moment_identity, classify_regime, segment_mean, tail_condition_check,
    temperature_on_axis, temperature_parts, temperature_stieltjes, u0_closed_form,
    weber_asymptotic, weber_integral, EvalParams, FieldPoint, LogValue, Perturbed, Piecewise,
    PowerLaw, RayGeometry, RayTemperature, Regime, Remainder, TrigProfile, WeberMethod, WeberQuery,
};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Mutation {
    None,
    WrongConstant,
    LinearAccumulation,
}

type Outcome = Result<(), String>;
type Suite = Box<dyn Fn() -> Outcome>;

fn check(ok: bool, msg: impl FnOnce() -> String) -> Outcome {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn core<T>(r: vtheat_core::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn rel(a: f64, b: f64) -> f64 {
    (a / b - 1.0).abs()
}

fn measures() -> Vec<CountingFunction> {
    let base = PowerLaw::new(1.0, 1.0, 0.0, Mode::Density).unwrap();
    vec![
        base.into(),
        PowerLaw::new(2.0, 0.5, 1.0, Mode::Density).unwrap().into(),
        PowerLaw::new(1.0, 2.0, 1.0, Mode::Counting).unwrap().into(),
        Perturbed::new(base, Remainder::LogDamped, 0.5)
            .unwrap()
            .into(),
        Perturbed::new(base, Remainder::HalfPower, 0.5)
            .unwrap()
            .into(),
        Atoms::new(vec![(1.0, 1.0), (2.5, 0.5), (7.0, 3.0)])
            .unwrap()
            .into(),
    ]
}

fn suite_measure() -> Outcome {
    for n in measures() {
        let mut prev = 0.0;
        for k in 0..200 {
            let s = 0.05 * k as f64;
            let v = n.eval(s);
            check(v >= prev, || format!("{n:?} decreases at s = {s}"))?;
            prev = v;
        }
        let v = core(tail_condition_check(&n, 1.0))?;
        check(v.passed(), || format!("tail condition fails for {n:?}"))?;
    }
    let d = PowerLaw::new(1.0, 1.5, 0.0, Mode::Density).unwrap();
    let c = PowerLaw::new(1.0 / 2.5, 2.5, 0.0, Mode::Counting).unwrap();
    for s in [0.5, 1.0, 3.0, 10.0] {
        check(rel(d.count(s), c.count(s)) < 1e-12, || {
            format!("density and counting modes disagree at s = {s}")
        })?;
    }
    let v = core(tail_condition_check_log(|s| s * s, 100.0, 1.0))?;
    check(!v.passed(), || {
        "super-Gaussian growth was not detected".into()
    })
}

fn suite_kernel() -> Outcome {
    let p = EvalParams::default();
    let ray = RayGeometry::new(0.3).unwrap();
    for alpha in [0.5, 2.0] {
        let n: CountingFunction = PowerLaw::density(1.0, alpha).unwrap().into();
        for r in [0.0, 5.0, 20.0] {
            for delta in [0.0, FRAC_PI_2, PI] {
                let x = core(FieldPoint::at_offset(r, &ray, delta))?;
                let a = core(temperature_stieltjes(&n, &ray, &x, 1.0, &p))?;
                let b = core(temperature_parts(&n, &ray, &x, 1.0, &p))?;
                check(a.rel_diff(b).abs() < 1e-8, || {
                    format!("parts and Stieltjes forms differ at alpha={alpha} r={r} delta={delta}")
                })?;
                let n2: CountingFunction = PowerLaw::density(3.0, alpha).unwrap().into();
                let c = core(temperature_stieltjes(&n2, &ray, &x, 1.0, &p))?;
                check(
                    (c.log_mag() - a.log_mag() - 3f64.ln()).abs() < 1e-12,
                    || "temperature is not homogeneous in a0".into(),
                )?;
            }
        }
    }
    let n: CountingFunction = PowerLaw::density(1.0, 1.0).unwrap().into();
    let axis = core(temperature_on_axis(&n, 0.7, &p))?;
    check(rel(axis.to_f64(), 0.5 / PI) < 1e-9, || {
        format!("on-axis value {} is not 1/(2 pi)", axis.to_f64())
    })?;
    Ok(())
}

fn suite_weber() -> Outcome {
    for nu in [-0.5, -1.0, -1.5, -2.5] {
        let q = WeberQuery::new(nu, 0.0).with_method(WeberMethod::Integral);
        let v = core(weber_integral(&q))?;
        check(v.rel_diff(weber_at_zero(nu)).abs() < 1e-9, || {
            format!("D_nu(0) disagrees with the Gamma form at nu = {nu}")
        })?;
        for z in [-10.0, 10.0] {
            let q = WeberQuery::new(nu, z);
            let i = core(weber_integral(&q))?;
            let s = core(weber_asymptotic(&q, 200))?;
            check(s.value.rel_diff(i).abs() < 1e-6, || {
                format!("integral and series differ at nu = {nu}, z = {z}")
            })?;
        }
    }
    let d = core(weber_integral(&WeberQuery::new(-1.0, 0.0)))?;
    check(rel(d.to_f64(), (0.5 * PI).sqrt()) < 1e-10, || {
        "D_-1(0) is not sqrt(pi/2)".into()
    })
}

fn suite_exact_identity() -> Outcome {
    let p = EvalParams::default();
    let ray = RayGeometry::default();
    for alpha in [0.5, 1.0, 2.0] {
        let n: CountingFunction = PowerLaw::density(1.0, alpha).unwrap().into();
        for r in [0.0, 5.0, 20.0] {
            for delta in [0.0, FRAC_PI_4, 3.0 * FRAC_PI_4] {
                let x = core(FieldPoint::at_offset(r, &ray, delta))?;
                let u = core(temperature_stieltjes(&n, &ray, &x, 1.0, &p))?;
                let w = core(u0_closed_form(1.0, alpha, r, delta, 1.0))?;
                check(u.rel_diff(w).abs() < 1e-6, || {
                    format!(
                        "Weber form differs from quadrature at alpha={alpha} r={r} delta={delta}"
                    )
                })?;
            }
        }
    }
    Ok(())
}

/// Regime formula, or the misprinted forward constant under mutation.
fn asym(m: Mutation, a0: f64, alpha: f64, r: f64, delta: f64, tau: f64) -> Result<f64, String> {
    let regime = classify_regime(delta, DEFAULT_EPS_DELTA);
    if m == Mutation::WrongConstant && regime == Regime::Forward {
        let (c, s) = (delta.cos(), delta.sin());
        return Ok(a0.ln() - PI.ln()
            + 0.5 * (alpha - 3.0) * 2f64.ln()
            + 0.5 * (alpha - 1.0) * tau.ln()
            + alpha * (r * c).ln()
            - r * r * s * s / (4.0 * tau));
    }
    Ok(core(asym_log_in(regime, a0, alpha, r, delta, tau))?.log_mag())
}

fn suite_regimes(m: Mutation) -> Outcome {
    let p = EvalParams::default();
    let ray = RayGeometry::default();
    let tau = 1.0f64;
    for alpha in [0.5, 1.0, 2.0] {
        let n: CountingFunction = PowerLaw::density(1.0, alpha).unwrap().into();
        for delta in [0.0, FRAC_PI_4, FRAC_PI_2, PI] {
            let cos = delta.cos().abs();
            let radii: Vec<f64> = if cos < DEFAULT_EPS_DELTA {
                vec![3.0, 10.0, 30.0]
            } else {
                [30.0, 45.0, 60.0]
                    .iter()
                    .map(|z| z * (2.0 * tau).sqrt() / cos)
                    .collect()
            };
            for r in radii {
                let x = core(FieldPoint::at_offset(r, &ray, delta))?;
                let u = core(temperature_stieltjes(&n, &ray, &x, tau, &p))?;
                let a = asym(m, 1.0, alpha, r, delta, tau)?;
                let ratio = (u.log_mag() - a).exp();
                check((ratio - 1.0).abs() <= 0.02, || {
                    format!("ratio {ratio} at alpha={alpha} delta={delta} r={r}")
                })?;
            }
        }
    }
    Ok(())
}

fn suite_underflow(m: Mutation) -> Outcome {
    let p = EvalParams::default();
    let ray = RayGeometry::default();
    let n: CountingFunction = PowerLaw::density(1.0, 1.0).unwrap().into();
    for r in [10.0, 30.0, 100.0] {
        let x = core(FieldPoint::at_offset(r, &ray, PI))?;
        let mut u = core(temperature_stieltjes(&n, &ray, &x, 1.0, &p))?;
        if m == Mutation::LinearAccumulation {
            u = LogValue::from_f64(u.to_f64());
        }
        check(u.sign() == 1 && u.log_mag().is_finite(), || {
            format!("temperature lost to underflow at r = {r}")
        })?;
        let a = asym(m, 1.0, 1.0, r, PI, 1.0)?;
        check((u.log_mag() - a).abs() < 0.1, || {
            format!("ln u = {} far from {a} at r = {r}", u.log_mag())
        })?;
    }
    Ok(())
}

fn suite_audit() -> Outcome {
    let (c, pw, q) = (-1.25, 1.5, -0.125);
    let rows: Vec<SweepRow> = [10.0, 20.0, 40.0, 80.0, 160.0]
        .iter()
        .map(|&r: &f64| SweepRow {
            r,
            ln_u_quad: c + pw * r.ln() + q * r * r,
            ln_u_asym: 0.0,
            ratio: 1.0,
            quad_failed: false,
            weber_arg: r,
        })
        .collect();
    let a = core(constant_audit(
        &rows,
        Regime::Forward,
        1.0,
        1.5,
        1.0,
        FRAC_PI_4,
    ))?;
    check(
        (a.fitted.c - c).abs() < 1e-10
            && (a.fitted.p - pw).abs() < 1e-10
            && (a.fitted.q - q).abs() < 1e-10,
        || format!("synthetic coefficients not recovered: {:?}", a.fitted),
    )
}

fn suite_tauberian() -> Outcome {
    let p = EvalParams::default();
    let law = PowerLaw::density(3.0, 2.0).unwrap();
    let n: CountingFunction = law.into();
    let u = RayTemperature::new(n.clone(), RayGeometry::new(1.0).unwrap(), p);
    let spec = core(RecoverySpec::geometric(
        vec![2.0, 4.0, 8.0],
        0.16,
        0.5,
        4,
        2,
    ))?;
    let rep = core(recover(&u, &spec, &p, Some(&n)))?;
    let (a0, alpha) = rep.fit.ok_or("power-law fit failed")?;
    check(rel(alpha, 3.0) < 0.02 && rel(a0, 1.0) < 0.05, || {
        format!("recovered ({a0}, {alpha}) instead of (1, 3)")
    })?;
    let a = TrigProfile {
        mean: 1.0,
        cos: vec![0.5, 0.25],
        sin: vec![0.1],
    };
    let mi = core(angular_moment_identity(&a, 4096, 0.5, 2.0))?;
    check(mi.rel_diff <= 1e-8, || "angular moment identity".into())?;
    let step = Piecewise::Step {
        at: 1.0,
        left: 0.0,
        right: 1.0,
    };
    check(segment_mean(&step, 1.0) == 0.5, || {
        "segment mean of a step".into()
    })
}

fn suite_remainder() -> Outcome {
    let p = EvalParams::default();
    let ray = RayGeometry::default();
    let base = PowerLaw::density(1.0, 1.0).unwrap();
    for rem in [Remainder::LogDamped, Remainder::HalfPower] {
        let n = core(Perturbed::new(base, rem, 0.05))?;
        let s = core(vtheat_core::remainder_ratio_sweep(
            &n,
            &ray,
            0.0,
            1.0,
            &[20.0, 40.0, 80.0],
            &p,
        ))?;
        check(s.decreasing, || {
            format!("{} remainder does not fade", rem.as_str())
        })?;
    }
    Ok(())
}

fn suite_special() -> Outcome {
    check((ln_gamma(0.5) - 0.5 * PI.ln()).abs() < 1e-13, || {
        "ln Gamma(1/2) is not ln sqrt(pi)".into()
    })
}

pub fn run(inject: Option<&str>) -> Result<(), CliError> {
    let m = match inject {
        None => Mutation::None,
        Some("wrong-constant") => Mutation::WrongConstant,
        Some("linear-accumulation") => Mutation::LinearAccumulation,
        Some(other) => return Err(CliError::Validation(format!("unknown injection `{other}`"))),
    };
    let suites: Vec<(&str, Suite)> = vec![
        ("special-functions", Box::new(suite_special)),
        ("measure", Box::new(suite_measure)),
        ("representation", Box::new(suite_kernel)),
        ("weber", Box::new(suite_weber)),
        ("weber-identity", Box::new(suite_exact_identity)),
        ("regime-agreement", Box::new(move || suite_regimes(m))),
        ("underflow-detection", Box::new(move || suite_underflow(m))),
        ("audit", Box::new(suite_audit)),
        ("tauberian", Box::new(suite_tauberian)),
        ("remainder", Box::new(suite_remainder)),
    ];
    let mut failed = 0;
    for (name, f) in &suites {
        match f() {
            Ok(()) => println!("{name:<20} PASS"),
            Err(why) => {
                failed += 1;
                println!("{name:<20} FAIL  {why}");
            }
        }
    }
    if failed > 0 {
        return Err(CliError::Numerical(format!(
            "{failed} self-test suite(s) failed"
        )));
    }
    Ok(())
}
