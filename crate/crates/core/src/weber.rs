//! Parabolic cylinder (Weber) functions `D_nu(z)` for real `z` and `nu < 0`.
//!
//! Two independent routes are provided: the integral representation
//! `D_nu(z) = exp(-z^2/4) / Gamma(-nu) int_0^inf exp(-z t - t^2/2) t^(-nu-1) dt`
//! evaluated by log-domain quadrature, and the large-`|z|` asymptotic
//! expansion on the real axis. For `z < 0` the branch `arg z = pi` is used
//! and the expansion is taken in its real form
//! `D_nu(-x) = cos(pi nu) D_nu(x) + sqrt(2 pi) / Gamma(-nu) x^(-nu-1) e^(x^2/4) S2(x)`.

use std::f64::consts::{LN_2, PI};

use crate::error::{Error, Result};
use crate::logval::LogValue;
use crate::quadrature::integrate_panels;
use crate::special::ln_gamma;

/// Below this `|z|` the expansion is refused.
pub const SERIES_MIN_ABS_Z: f64 = 4.0;
/// `weber_auto` switches from quadrature to the expansion at this `|z|`.
pub const AUTO_SWITCH_ABS_Z: f64 = 8.0;
/// Upper end of the band where both routes are evaluated and compared.
pub const CROSS_CHECK_ABS_Z: f64 = 12.0;
/// Required relative agreement inside the cross-check band.
pub const CROSS_CHECK_TOL: f64 = 1e-6;
/// Term cap used by `weber_auto`.
pub const AUTO_MAX_TERMS: usize = 200;

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WeberMethod {
    Integral,
    Series,
    #[default]
    Auto,
}

impl std::str::FromStr for WeberMethod {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "integral" => Ok(WeberMethod::Integral),
            "series" => Ok(WeberMethod::Series),
            "auto" => Ok(WeberMethod::Auto),
            other => Err(Error::validation(format!("unknown Weber method `{other}`"))),
        }
    }
}

/// A request for `D_nu(z)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeberQuery {
    pub nu: f64,
    pub z: f64,
    pub method: WeberMethod,
    pub rel_tol: f64,
}

impl WeberQuery {
    pub fn new(nu: f64, z: f64) -> Self {
        WeberQuery {
            nu,
            z,
            method: WeberMethod::Auto,
            rel_tol: 1e-12,
        }
    }

    pub fn with_method(mut self, method: WeberMethod) -> Self {
        self.method = method;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.nu.is_finite() && self.nu < 0.0) {
            return Err(Error::validation(format!(
                "the integral representation needs nu < 0, got {}",
                self.nu
            )));
        }
        if !self.z.is_finite() {
            return Err(Error::validation("z must be finite"));
        }
        if !(self.rel_tol > 0.0 && self.rel_tol < 1.0) {
            return Err(Error::validation("rel_tol must lie in (0, 1)"));
        }
        Ok(())
    }
}

/// A truncated asymptotic expansion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesResult {
    pub value: LogValue,
    pub terms_used: usize,
    /// First omitted term relative to `value`.
    pub trunc_error_estimate: f64,
}

/// Rising factorial `a (a+1) ... (a+n-1)`.
pub fn pochhammer(a: f64, n: usize) -> f64 {
    (0..n).fold(1.0, |acc, k| acc * (a + k as f64))
}

/// `D_nu(z)` from the integral representation.
pub fn weber_integral(q: &WeberQuery) -> Result<LogValue> {
    q.validate()?;
    let p = -q.nu - 1.0;
    let z = q.z;
    // exp(-z t - t^2/2) = exp(z^2/2) exp(-(t + z)^2 / 2)
    let c = -z;
    let peak = if p > 0.0 {
        0.5 * (c + (c * c + 4.0 * p).sqrt())
    } else {
        c.max(0.0)
    };
    let width = 14.0;
    let hi = peak + width;
    let lo = (peak - width).max(0.0);
    let breaks_t = [0.0, lo, peak, hi];

    let ln_integral = if p < 0.0 {
        // t = u^(1/(p+1)) removes the t^p singularity at the origin
        let k = 1.0 / (p + 1.0);
        let f = |u: f64| {
            let t = u.powf(k);
            LogValue::from_log(-0.5 * (t - c).powi(2))
        };
        let breaks: Vec<f64> = dedup(breaks_t.iter().map(|t| t.powf(p + 1.0)).collect());
        let out = integrate_panels(f, &breaks, q.rel_tol, 200)?;
        out.value.log_mag() + k.ln()
    } else {
        let f = |t: f64| {
            if t == 0.0 && p > 0.0 {
                return LogValue::ZERO;
            }
            LogValue::from_log(p * t.ln() - 0.5 * (t - c).powi(2))
        };
        let breaks = dedup(breaks_t.to_vec());
        integrate_panels(f, &breaks, q.rel_tol, 200)?
            .value
            .log_mag()
    };
    // exp(-z^2/4) * exp(z^2/2) = exp(z^2/4)
    Ok(LogValue::from_log(
        0.25 * z * z - ln_gamma(-q.nu) + ln_integral,
    ))
}

fn dedup(mut v: Vec<f64>) -> Vec<f64> {
    v.dedup_by(|b, a| *b <= *a);
    v
}

/// Optimally truncated `sum_n (a)_n (b)_n / (n! w^n)`.
/// Returns the partial sum, the number of terms and `|first omitted term|`.
fn asymptotic_sum(a: f64, b: f64, w: f64, n_max: usize) -> (f64, usize, f64) {
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut n = 0usize;
    loop {
        let next = term * (a + n as f64) * (b + n as f64) / ((n as f64 + 1.0) * w);
        if next == 0.0 {
            return (sum, n + 1, 0.0);
        }
        if n >= n_max || next.abs() >= term.abs() {
            return (sum, n + 1, next.abs());
        }
        sum += next;
        term = next;
        n += 1;
    }
}

/// `D_nu(x)` for `x > 0` from the recessive expansion, in log form, together
/// with the absolute truncation error in log form.
fn recessive(nu: f64, x: f64, n_max: usize) -> (LogValue, f64, usize) {
    let (s, terms, omitted) = asymptotic_sum(-0.5 * nu, 0.5 * (1.0 - nu), -0.5 * x * x, n_max);
    let ln_scale = nu * x.ln() - 0.25 * x * x;
    (
        LogValue::from_f64(s).scale_log(ln_scale),
        omitted.ln() + ln_scale,
        terms,
    )
}

/// `D_nu(z)` from the large-`|z|` expansion on the real axis, truncated at
/// the smallest term or after `n_max` terms.
pub fn weber_asymptotic(q: &WeberQuery, n_max: usize) -> Result<SeriesResult> {
    q.validate()?;
    let z = q.z;
    if z.abs() < SERIES_MIN_ABS_Z {
        return Err(Error::validation(format!(
            "|z| = {} is below {SERIES_MIN_ABS_Z}; use the integral representation",
            z.abs()
        )));
    }
    let nu = q.nu;
    if z > 0.0 {
        let (value, ln_err, terms) = recessive(nu, z, n_max);
        return Ok(SeriesResult {
            value,
            terms_used: terms,
            trunc_error_estimate: (ln_err - value.log_mag()).exp(),
        });
    }
    let x = -z;
    // dominant part: sqrt(2 pi) / Gamma(-nu) x^(-nu-1) e^(x^2/4) S2
    let (s2, terms, omitted2) =
        asymptotic_sum(0.5 * (1.0 + nu), 0.5 * (2.0 + nu), 0.5 * x * x, n_max);
    let ln_dom = LN_SQRT_2PI - ln_gamma(-nu) + (-nu - 1.0) * x.ln() + 0.25 * x * x;
    let dominant = LogValue::from_f64(s2).scale_log(ln_dom);
    let (sub, ln_err_sub, _) = recessive(nu, x, n_max);
    let sub = sub * LogValue::from_f64((PI * nu).cos());
    let value = dominant + sub;
    if value.sign() <= 0 {
        return Err(Error::numerical("asymptotic expansion lost positivity"));
    }
    let ln_err = crate::logval::log_add_exp(
        omitted2.ln() + ln_dom,
        ln_err_sub + (PI * nu).cos().abs().ln(),
    );
    Ok(SeriesResult {
        value,
        terms_used: terms,
        trunc_error_estimate: (ln_err - value.log_mag()).exp(),
    })
}

/// Which route produced a Weber value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeberReport {
    pub value: LogValue,
    pub integral: Option<LogValue>,
    pub series: Option<SeriesResult>,
}

/// Evaluates `q` by its configured method; `Auto` cross-checks both routes
/// for `8 <= |z| <= 12`.
pub fn weber_evaluate(q: &WeberQuery) -> Result<WeberReport> {
    q.validate()?;
    match q.method {
        WeberMethod::Integral => {
            let v = weber_integral(q)?;
            Ok(WeberReport {
                value: v,
                integral: Some(v),
                series: None,
            })
        }
        WeberMethod::Series => {
            let s = weber_asymptotic(q, AUTO_MAX_TERMS)?;
            Ok(WeberReport {
                value: s.value,
                integral: None,
                series: Some(s),
            })
        }
        WeberMethod::Auto => {
            let a = q.z.abs();
            if a < AUTO_SWITCH_ABS_Z {
                let v = weber_integral(q)?;
                return Ok(WeberReport {
                    value: v,
                    integral: Some(v),
                    series: None,
                });
            }
            let s = weber_asymptotic(q, AUTO_MAX_TERMS)?;
            if a <= CROSS_CHECK_ABS_Z {
                let v = weber_integral(q)?;
                let diff = s.value.rel_diff(v).abs();
                if diff > CROSS_CHECK_TOL {
                    return Err(Error::Numerical {
                        message: format!(
                            "Weber routes disagree at nu = {}, z = {}: relative difference {diff:e}",
                            q.nu, q.z
                        ),
                        estimate: Some(v.log_mag()),
                        error_estimate: Some(diff),
                    });
                }
                return Ok(WeberReport {
                    value: s.value,
                    integral: Some(v),
                    series: Some(s),
                });
            }
            Ok(WeberReport {
                value: s.value,
                integral: None,
                series: Some(s),
            })
        }
    }
}

/// `D_nu(z)`, integral below `|z| = 8`, expansion above.
pub fn weber_auto(q: &WeberQuery) -> Result<LogValue> {
    let q = WeberQuery {
        method: WeberMethod::Auto,
        ..*q
    };
    Ok(weber_evaluate(&q)?.value)
}

/// `D_nu(0) = 2^(nu/2) sqrt(pi) / Gamma((1 - nu)/2)`, exact.
pub fn weber_at_zero(nu: f64) -> LogValue {
    LogValue::from_log(0.5 * nu * LN_2 + 0.5 * PI.ln() - ln_gamma(0.5 * (1.0 - nu)))
}

fn validate_u0(a0: f64, alpha: f64, r: f64, tau: f64) -> Result<()> {
    if !(a0.is_finite() && a0 >= 0.0) {
        return Err(Error::validation("a0 must be >= 0"));
    }
    if !(alpha.is_finite() && alpha > -1.0) {
        return Err(Error::validation("alpha must be > -1"));
    }
    if !(r.is_finite() && r >= 0.0) {
        return Err(Error::validation("r must be >= 0"));
    }
    if !(tau.is_finite() && tau > 0.0) {
        return Err(Error::validation("tau must be > 0"));
    }
    Ok(())
}

/// Everything in the Weber representation of `u0` except `D_{-alpha-1}(z)`,
/// plus the argument `z = -r cos(delta) / sqrt(2 tau)`.
pub fn u0_prefactor(a0: f64, alpha: f64, r: f64, delta: f64, tau: f64) -> Result<(LogValue, f64)> {
    validate_u0(a0, alpha, r, tau)?;
    if a0 == 0.0 {
        return Ok((LogValue::ZERO, 0.0));
    }
    let sin_sq = delta.sin().powi(2);
    let ln_pref = a0.ln() + ln_gamma(alpha + 1.0) - PI.ln()
        + 0.5 * (alpha - 3.0) * LN_2
        + 0.5 * (alpha - 1.0) * tau.ln()
        - r * r / (8.0 * tau) * (1.0 + sin_sq);
    let z = -r * delta.cos() / (2.0 * tau).sqrt();
    Ok((LogValue::from_log(ln_pref), z))
}

/// Temperature of the density `a0 s^alpha ds` on a ray, written exactly
/// through `D_{-alpha-1}`:
/// `u0 = (a0 Gamma(alpha+1) / pi) 2^((alpha-3)/2) tau^((alpha-1)/2)
///       exp(-(r^2 / 8 tau)(1 + sin^2 delta)) D_{-alpha-1}(-r cos(delta) / sqrt(2 tau))`.
pub fn u0_closed_form(a0: f64, alpha: f64, r: f64, delta: f64, tau: f64) -> Result<LogValue> {
    let (pref, z) = u0_prefactor(a0, alpha, r, delta, tau)?;
    if pref.is_zero() {
        return Ok(LogValue::ZERO);
    }
    let d = weber_auto(&WeberQuery::new(-alpha - 1.0, z))?;
    Ok(pref * d)
}
