//! Large-`|x|` behaviour of ray temperatures in the three angular regimes,
//! radial convergence sweeps and least-squares audits of the constants.

use std::f64::consts::{LN_2, PI};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::kernel::{temperature_stieltjes, EvalParams};
use crate::logval::LogValue;
use crate::measure::{CountingFunction, FieldPoint, Perturbed, PowerLaw, RayGeometry};
use crate::special::ln_gamma;

/// `|cos D|` at or below which a direction counts as perpendicular.
pub const DEFAULT_EPS_DELTA: f64 = 1e-9;

/// Audit tolerance on the Gaussian coefficient `q` (relative).
pub const AUDIT_Q_REL_TOL: f64 = 5e-3;
/// Audit tolerance on the power `p` (relative; absolute when `p` should be 0).
pub const AUDIT_P_REL_TOL: f64 = 1e-2;
/// Audit tolerance on the additive constant `c` (absolute, in log units).
pub const AUDIT_C_ABS_TOL: f64 = 5e-2;

/// Sign of `cos(theta - theta0)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    Forward,
    Perpendicular,
    Backward,
}

impl Regime {
    pub fn as_str(&self) -> &'static str {
        match self {
            Regime::Forward => "forward",
            Regime::Perpendicular => "perpendicular",
            Regime::Backward => "backward",
        }
    }
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

pub fn classify_regime(delta: f64, eps_delta: f64) -> Regime {
    let c = delta.cos();
    if c.abs() <= eps_delta {
        Regime::Perpendicular
    } else if c > 0.0 {
        Regime::Forward
    } else {
        Regime::Backward
    }
}

/// Leading large-`r` form of the temperature of `a0 s^alpha ds` on a ray:
///
/// * forward: `a0 / (2 sqrt(pi tau)) (r cos D)^alpha exp(-r^2 sin^2 D / 4 tau)`
/// * perpendicular: `(a0 / pi) Gamma((alpha+1)/2) 2^(alpha-2) tau^((alpha-1)/2) exp(-r^2 / 4 tau)`
/// * backward: `(a0 / pi) Gamma(alpha+1) 2^(alpha-1) tau^alpha (r |cos D|)^-(alpha+1) exp(-r^2 / 4 tau)`
pub fn asym_log(a0: f64, alpha: f64, r: f64, delta: f64, tau: f64) -> Result<LogValue> {
    asym_log_in(
        classify_regime(delta, DEFAULT_EPS_DELTA),
        a0,
        alpha,
        r,
        delta,
        tau,
    )
}

/// [`asym_log`] with the regime chosen by the caller.
pub fn asym_log_in(
    regime: Regime,
    a0: f64,
    alpha: f64,
    r: f64,
    delta: f64,
    tau: f64,
) -> Result<LogValue> {
    if !(a0.is_finite() && a0 >= 0.0) {
        return Err(Error::validation("a0 must be >= 0"));
    }
    if !(alpha.is_finite() && alpha > -1.0) {
        return Err(Error::validation("alpha must be > -1"));
    }
    if !(tau.is_finite() && tau > 0.0) {
        return Err(Error::validation("tau must be > 0"));
    }
    if !(r.is_finite() && r >= 0.0) {
        return Err(Error::validation("r must be >= 0"));
    }
    if a0 == 0.0 {
        return Ok(LogValue::ZERO);
    }
    let c = delta.cos();
    let ln = match regime {
        Regime::Forward => {
            if r == 0.0 {
                return Err(Error::validation("the forward formula needs r > 0"));
            }
            a0.ln() - (2.0 * (PI * tau).sqrt()).ln() + alpha * (r * c).ln()
                - r * r * delta.sin().powi(2) / (4.0 * tau)
        }
        Regime::Perpendicular => {
            a0.ln() - PI.ln()
                + ln_gamma(0.5 * (alpha + 1.0))
                + (alpha - 2.0) * LN_2
                + 0.5 * (alpha - 1.0) * tau.ln()
                - r * r / (4.0 * tau)
        }
        Regime::Backward => {
            if r == 0.0 {
                return Err(Error::validation("the backward formula needs r > 0"));
            }
            a0.ln() - PI.ln() + ln_gamma(alpha + 1.0) + (alpha - 1.0) * LN_2 + alpha * tau.ln()
                - (alpha + 1.0) * (r * c.abs()).ln()
                - r * r / (4.0 * tau)
        }
    };
    Ok(LogValue::from_log(ln))
}

/// [`asym_log`] for a power law in either mode; counting-mode laws
/// `a0 s^alpha` are compared as the density `a0 alpha s^(alpha-1) ds`.
pub fn asym_for_power_law(law: &PowerLaw, r: f64, delta: f64, tau: f64) -> Result<LogValue> {
    let (a, e) = law.as_density_law();
    asym_log(a, e, r, delta, tau)
}

/// Parameters of a radial sweep `r_k = r_start r_factor^k`, `k < steps`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSpec {
    pub delta: f64,
    pub t: f64,
    pub r_start: f64,
    pub r_factor: f64,
    pub steps: usize,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.steps < 4 {
            return Err(Error::validation("a sweep needs at least 4 steps"));
        }
        if !(self.r_factor.is_finite() && self.r_factor > 1.0) {
            return Err(Error::validation("r_factor must be > 1"));
        }
        if !(self.r_start.is_finite() && self.r_start > 0.0) {
            return Err(Error::validation("r_start must be > 0"));
        }
        if !(self.t.is_finite() && self.t > 0.0) {
            return Err(Error::validation("t must be > 0"));
        }
        if !self.delta.is_finite() {
            return Err(Error::validation("delta must be finite"));
        }
        Ok(())
    }

    pub fn radii(&self) -> Vec<f64> {
        (0..self.steps)
            .map(|k| self.r_start * self.r_factor.powi(k as i32))
            .collect()
    }
}

/// One radius of a convergence sweep. `ln_u_quad` is NaN when the
/// quadrature failed (`quad_failed`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub r: f64,
    pub ln_u_quad: f64,
    pub ln_u_asym: f64,
    pub ratio: f64,
    pub quad_failed: bool,
    /// `|z| = r |cos D| / sqrt(2 tau)`, the Weber argument at this radius.
    pub weber_arg: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub regime: Regime,
    pub rows: Vec<SweepRow>,
    /// `|ratio - 1|` nonincreasing over the last three rows.
    pub monotone_approach: bool,
}

fn nonincreasing_tail(devs: &[f64]) -> bool {
    devs.len() >= 3 && devs[devs.len() - 3..].windows(2).all(|w| w[1] <= w[0])
}

/// Compares quadrature with the regime formula along `r_k = r_start r_factor^k`.
/// Rows are evaluated in parallel; a failed row is flagged and the sweep
/// continues.
pub fn convergence_sweep(
    law: &PowerLaw,
    ray: &RayGeometry,
    spec: &SweepSpec,
    p: &EvalParams,
) -> Result<Sweep> {
    spec.validate()?;
    let tau = p.tau(spec.t)?;
    let measure = CountingFunction::PowerLaw(*law);
    let regime = classify_regime(spec.delta, DEFAULT_EPS_DELTA);
    let radii = spec.radii();
    let rows: Vec<SweepRow> = radii
        .par_iter()
        .map(|&r| -> Result<SweepRow> {
            let asym = asym_for_power_law(law, r, spec.delta, tau)?;
            let x = FieldPoint::at_offset(r, ray, spec.delta)?;
            let weber_arg = r * spec.delta.cos().abs() / (2.0 * tau).sqrt();
            Ok(match temperature_stieltjes(&measure, ray, &x, spec.t, p) {
                Ok(u) => SweepRow {
                    r,
                    ln_u_quad: u.log_mag(),
                    ln_u_asym: asym.log_mag(),
                    ratio: (u.log_mag() - asym.log_mag()).exp(),
                    quad_failed: false,
                    weber_arg,
                },
                Err(_) => SweepRow {
                    r,
                    ln_u_quad: f64::NAN,
                    ln_u_asym: asym.log_mag(),
                    ratio: f64::NAN,
                    quad_failed: true,
                    weber_arg,
                },
            })
        })
        .collect::<Result<_>>()?;
    let devs: Vec<f64> = rows.iter().map(|r| (r.ratio - 1.0).abs()).collect();
    Ok(Sweep {
        regime,
        monotone_approach: nonincreasing_tail(&devs),
        rows,
    })
}

/// Coefficients of `ln u ~ c + p ln r + q r^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogModel {
    pub c: f64,
    pub p: f64,
    pub q: f64,
}

/// Leading-order coefficients predicted for a regime, for the density law
/// `a0 s^alpha ds`.
pub fn predicted_model(regime: Regime, a0: f64, alpha: f64, tau: f64, delta: f64) -> LogModel {
    let cos = delta.cos().abs();
    match regime {
        Regime::Forward => LogModel {
            c: a0.ln() - (2.0 * (PI * tau).sqrt()).ln() + alpha * cos.ln(),
            p: alpha,
            q: -delta.sin().powi(2) / (4.0 * tau),
        },
        Regime::Perpendicular => LogModel {
            c: a0.ln() - PI.ln()
                + ln_gamma(0.5 * (alpha + 1.0))
                + (alpha - 2.0) * LN_2
                + 0.5 * (alpha - 1.0) * tau.ln(),
            p: 0.0,
            q: -1.0 / (4.0 * tau),
        },
        Regime::Backward => LogModel {
            c: a0.ln() - PI.ln() + ln_gamma(alpha + 1.0) + (alpha - 1.0) * LN_2 + alpha * tau.ln()
                - (alpha + 1.0) * cos.ln(),
            p: -(alpha + 1.0),
            q: -1.0 / (4.0 * tau),
        },
    }
}

/// Fitted versus predicted coefficients for one sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AuditReport {
    pub regime: Regime,
    pub fitted: LogModel,
    pub predicted: LogModel,
    pub rows_used: usize,
    pub max_ratio_deviation: f64,
    pub q_ok: bool,
    pub p_ok: bool,
    pub c_ok: bool,
    pub converged: bool,
}

/// Least-squares fit of `ln u = c + p ln r + q r^2` to `(r, ln u)` pairs.
pub fn fit_log_model(points: &[(f64, f64)]) -> Result<LogModel> {
    if points.len() < 4 {
        return Err(Error::validation(format!(
            "the audit fit needs at least 4 rows, got {}",
            points.len()
        )));
    }
    let n = points.len();
    // scaled columns keep the normal matrix well conditioned
    let r_ref = points.iter().map(|p| p.0).fold(0.0f64, f64::max);
    let l_ref = r_ref.ln();
    let design = nalgebra::DMatrix::from_fn(n, 3, |i, j| {
        let r = points[i].0;
        match j {
            0 => 1.0,
            1 => r.ln() - l_ref,
            _ => (r / r_ref).powi(2),
        }
    });
    let rhs = nalgebra::DVector::from_iterator(n, points.iter().map(|p| p.1));
    let svd = design.svd(true, true);
    let sv = &svd.singular_values;
    let smax = sv.max();
    let smin = sv.min();
    if !(smin > 1e-9 * smax) {
        return Err(Error::validation(
            "audit fit is rank deficient; widen the radius range",
        ));
    }
    let sol = svd
        .solve(&rhs, 0.0)
        .map_err(|e| Error::numerical(format!("least squares failed: {e}")))?;
    let (c0, p, q_scaled) = (sol[0], sol[1], sol[2]);
    Ok(LogModel {
        c: c0 - p * l_ref,
        p,
        q: q_scaled / (r_ref * r_ref),
    })
}

/// Fits the converged rows of a sweep and compares with the regime's
/// predicted coefficients.
pub fn constant_audit(
    rows: &[SweepRow],
    regime: Regime,
    a0: f64,
    alpha: f64,
    tau: f64,
    delta: f64,
) -> Result<AuditReport> {
    let used: Vec<&SweepRow> = rows.iter().filter(|r| !r.quad_failed).collect();
    let points: Vec<(f64, f64)> = used.iter().map(|r| (r.r, r.ln_u_quad)).collect();
    let fitted = fit_log_model(&points)?;
    let predicted = predicted_model(regime, a0, alpha, tau, delta);
    // q vanishes along the ray itself; measure it against 1/(4 tau) there.
    let q_scale = if predicted.q == 0.0 {
        1.0 / (4.0 * tau)
    } else {
        predicted.q.abs()
    };
    let q_ok = (fitted.q - predicted.q).abs() <= AUDIT_Q_REL_TOL * q_scale;
    let p_ok = if predicted.p == 0.0 {
        fitted.p.abs() <= AUDIT_P_REL_TOL
    } else {
        ((fitted.p - predicted.p) / predicted.p).abs() <= AUDIT_P_REL_TOL
    };
    let c_ok = (fitted.c - predicted.c).abs() <= AUDIT_C_ABS_TOL;
    let max_ratio_deviation = used
        .iter()
        .map(|r| (r.ratio - 1.0).abs())
        .fold(0.0, f64::max);
    Ok(AuditReport {
        regime,
        fitted,
        predicted,
        rows_used: used.len(),
        max_ratio_deviation,
        q_ok,
        p_ok,
        c_ok,
        converged: q_ok && p_ok && c_ok,
    })
}

/// `u_total / u0` along a list of radii for a perturbed law, where `u0`
/// is the temperature of the base power law alone.
#[derive(Debug, Clone, PartialEq)]
pub struct RemainderSweep {
    pub rows: Vec<(f64, f64)>,
    /// `|ratio - 1|` strictly decreasing over the last three rows.
    pub decreasing: bool,
}

pub fn remainder_ratio_sweep(
    n: &Perturbed,
    ray: &RayGeometry,
    delta: f64,
    t: f64,
    radii: &[f64],
    p: &EvalParams,
) -> Result<RemainderSweep> {
    if classify_regime(delta, DEFAULT_EPS_DELTA) == Regime::Backward {
        return Err(Error::validation(
            "remainder domination is only checked in the forward and perpendicular regimes",
        ));
    }
    if radii.len() < 3 {
        return Err(Error::validation("need at least 3 radii"));
    }
    let total = CountingFunction::Perturbed(*n);
    let base = CountingFunction::PowerLaw(*n.base());
    let rows: Vec<(f64, f64)> = radii
        .par_iter()
        .map(|&r| -> Result<(f64, f64)> {
            let x = FieldPoint::at_offset(r, ray, delta)?;
            let u = temperature_stieltjes(&total, ray, &x, t, p)?;
            let u0 = temperature_stieltjes(&base, ray, &x, t, p)?;
            Ok((r, (u.log_mag() - u0.log_mag()).exp()))
        })
        .collect::<Result<_>>()?;
    let devs: Vec<f64> = rows.iter().map(|r| (r.1 - 1.0).abs()).collect();
    let tail = &devs[devs.len() - 3..];
    let decreasing = tail.windows(2).all(|w| w[1] < w[0]);
    Ok(RemainderSweep { rows, decreasing })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::{Mode, Remainder};
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    #[test]
    fn classification() {
        assert_eq!(classify_regime(FRAC_PI_2, 1e-12), Regime::Perpendicular);
        assert_eq!(classify_regime(FRAC_PI_4, 1e-12), Regime::Forward);
        assert_eq!(classify_regime(3.0 * FRAC_PI_4, 1e-12), Regime::Backward);
        assert_eq!(
            classify_regime(FRAC_PI_2 + 1e-10, 1e-9),
            Regime::Perpendicular
        );
    }

    #[test]
    fn backward_instantiation() {
        let u = asym_log(1.0, 1.0, 20.0, PI, 1.0).unwrap();
        assert!((u.log_mag() - (-100.0 - (400.0 * PI).ln())).abs() < 1e-12);
        assert!(asym_log(1.0, 1.0, 0.0, PI, 1.0)
            .unwrap_err()
            .is_validation());
    }

    #[test]
    fn forward_instantiation() {
        let u = asym_log(1.0, 1.0, 20.0, 0.0, 1.0).unwrap();
        assert!((u.to_f64() - 20.0 / (2.0 * PI.sqrt())).abs() < 1e-12);
    }

    #[test]
    fn perpendicular_linear_density_is_exact() {
        for &(r, tau) in &[(0.5, 0.3), (10.0, 1.0), (60.0, 4.0)] {
            let u = asym_log(1.0, 1.0, r, FRAC_PI_2, tau).unwrap();
            assert!((u.log_mag() - (-r * r / (4.0 * tau) - (2.0 * PI).ln())).abs() < 1e-12);
        }
    }

    #[test]
    fn synthetic_model_is_recovered() {
        let truth = LogModel {
            c: -1.3,
            p: 2.5,
            q: -0.125,
        };
        let rows: Vec<SweepRow> = (0..8)
            .map(|k| {
                let r = 10.0 * 1.3f64.powi(k);
                let ln = truth.c + truth.p * r.ln() + truth.q * r * r;
                SweepRow {
                    r,
                    ln_u_quad: ln,
                    ln_u_asym: ln,
                    ratio: 1.0,
                    quad_failed: false,
                    weber_arg: 0.0,
                }
            })
            .collect();
        let fit =
            fit_log_model(&rows.iter().map(|r| (r.r, r.ln_u_quad)).collect::<Vec<_>>()).unwrap();
        assert!((fit.c - truth.c).abs() < 1e-10);
        assert!((fit.p - truth.p).abs() < 1e-10);
        assert!((fit.q - truth.q).abs() < 1e-10);
    }

    #[test]
    fn audit_rejects_degenerate_inputs() {
        let row = SweepRow {
            r: 5.0,
            ln_u_quad: -1.0,
            ln_u_asym: -1.0,
            ratio: 1.0,
            quad_failed: false,
            weber_arg: 0.0,
        };
        assert!(constant_audit(&[row; 3], Regime::Forward, 1.0, 1.0, 1.0, 0.0).is_err());
        let err = constant_audit(&[row; 6], Regime::Forward, 1.0, 1.0, 1.0, 0.0).unwrap_err();
        assert!(err.is_validation());
    }

    #[test]
    fn zero_remainder_ratio_is_one() {
        let base = PowerLaw::new(1.0, 1.0, 0.0, Mode::Counting).unwrap();
        let n = Perturbed::new(base, Remainder::LogDamped, 0.0).unwrap();
        let sweep = remainder_ratio_sweep(
            &n,
            &RayGeometry::default(),
            0.0,
            1.0,
            &[5.0, 10.0, 20.0],
            &EvalParams::default(),
        )
        .unwrap();
        for (_, ratio) in sweep.rows {
            assert_eq!(ratio, 1.0);
        }
    }

    #[test]
    fn backward_remainder_sweep_is_refused() {
        let base = PowerLaw::new(1.0, 1.0, 0.0, Mode::Counting).unwrap();
        let n = Perturbed::new(base, Remainder::HalfPower, 1.0).unwrap();
        let err = remainder_ratio_sweep(
            &n,
            &RayGeometry::default(),
            PI,
            1.0,
            &[5.0, 10.0, 20.0],
            &EvalParams::default(),
        )
        .unwrap_err();
        assert!(err.is_validation());
    }
}
