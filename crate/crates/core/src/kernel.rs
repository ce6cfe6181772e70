//! Gauss-Weierstrass temperatures of ray-supported measures.
//!
//! Every representation is reduced to `tau = kappa t`: the kernel with
//! diffusivity `kappa` at time `t` is the unit-diffusivity kernel at time
//! `tau`. The squared distance between `x = (r, theta)` and the ray point
//! `y = s e^{i theta0}` is written as `(s - r cos D)^2 + r^2 sin^2 D` with
//! `D = theta - theta0`, which keeps the Gaussian exponent free of
//! cancellation.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::logval::{LogSum, LogValue};
use crate::measure::{CountingFunction, FieldPoint, RayGeometry};
use crate::quadrature::{integrate_panels, QuadOutcome};
use crate::special::bessel_i0e;

/// Numerical settings shared by the temperature evaluators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalParams {
    pub kappa: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
    pub truncation_sigmas: f64,
}

impl Default for EvalParams {
    fn default() -> Self {
        EvalParams {
            kappa: 1.0,
            rel_tol: 1e-10,
            max_subdivisions: 60,
            truncation_sigmas: 12.0,
        }
    }
}

impl EvalParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.kappa.is_finite() && self.kappa > 0.0) {
            return Err(Error::validation(format!(
                "kappa must be > 0, got {}",
                self.kappa
            )));
        }
        if !(self.rel_tol > 0.0 && self.rel_tol < 1.0) {
            return Err(Error::validation(format!(
                "rel_tol must lie in (0, 1), got {}",
                self.rel_tol
            )));
        }
        if self.max_subdivisions == 0 {
            return Err(Error::validation("max_subdivisions must be positive"));
        }
        if !(self.truncation_sigmas.is_finite() && self.truncation_sigmas > 0.0) {
            return Err(Error::validation("truncation_sigmas must be positive"));
        }
        Ok(())
    }

    /// Reduced time `kappa t`.
    pub fn tau(&self, t: f64) -> Result<f64> {
        self.validate()?;
        if !(t.is_finite() && t > 0.0) {
            return Err(Error::validation(format!("t must be > 0, got {t}")));
        }
        Ok(self.kappa * t)
    }
}

/// `(s - r cos D)` offset and `r^2 sin^2 D` for a field point.
#[derive(Debug, Clone, Copy)]
struct Geometry {
    along: f64,
    perp_sq: f64,
}

impl Geometry {
    fn new(x: &FieldPoint, ray: &RayGeometry) -> Self {
        let d = x.delta(ray);
        let r = x.r();
        Geometry {
            along: r * d.cos(),
            perp_sq: (r * d.sin()).powi(2),
        }
    }
}

fn ln_norm(tau: f64) -> f64 {
    -(4.0 * PI * tau).ln()
}

/// `(1 / 4 pi kappa t) exp(-|x - y|^2 / 4 kappa t)` with `y` on the ray at
/// radius `y_radius`.
pub fn heat_kernel_log(
    x: &FieldPoint,
    y_radius: f64,
    ray: &RayGeometry,
    t: f64,
    kappa: f64,
) -> Result<LogValue> {
    if !(t.is_finite() && t > 0.0) {
        return Err(Error::validation(format!("t must be > 0, got {t}")));
    }
    if !(kappa.is_finite() && kappa > 0.0) {
        return Err(Error::validation(format!("kappa must be > 0, got {kappa}")));
    }
    let tau = kappa * t;
    let g = Geometry::new(x, ray);
    let dist_sq = (y_radius - g.along).powi(2) + g.perp_sq;
    Ok(LogValue::from_log(ln_norm(tau) - dist_sq / (4.0 * tau)))
}

/// Integration window around the maximum of `s^e exp(-(s - c)^2 / 4 tau)`
/// on `[floor, inf)`: `(lo, peak, hi)`.
fn window(c: f64, floor: f64, tau: f64, exponent: f64, sigmas: f64) -> (f64, f64, f64) {
    let peak = if exponent > 0.0 {
        0.5 * (c + (c * c + 8.0 * tau * exponent).sqrt())
    } else {
        c.max(0.0)
    };
    let peak = peak.max(floor);
    let w = sigmas * (2.0 * tau).sqrt();
    ((peak - w).max(floor), peak, peak + w)
}

fn push_break(breaks: &mut Vec<f64>, x: f64) {
    if breaks.last().is_none_or(|&b| x > b) {
        breaks.push(x);
    }
}

fn check_outcome(out: QuadOutcome, rel_tol: f64) -> Result<LogValue> {
    if out.rel_error > 100.0 * rel_tol && !out.value.is_zero() {
        return Err(Error::Numerical {
            message: "quadrature error estimate exceeds tolerance".into(),
            estimate: Some(out.value.log_mag()),
            error_estimate: Some(out.rel_error),
        });
    }
    Ok(out.value)
}

/// Integrates `density(s) K(s)` over `breaks`. When the density behaves like
/// `s^e`, `-1 < e < 0`, at a support start of 0, the stretch up to one
/// diffusion length is mapped by `s = b w^m`, `m = 1/(e+1)`. The Jacobian
/// cancels `s^e` exactly, leaving `m b^(e+1) h(s) K(s)` with the bounded
/// `h(s) = density(s) s^-e`.
fn integrate_density<K>(
    n: &CountingFunction,
    kernel: K,
    mut breaks: Vec<f64>,
    tau: f64,
    p: &EvalParams,
) -> Result<LogValue>
where
    K: Fn(f64) -> LogValue,
{
    let f = |s: f64| LogValue::from_f64(n.density_at(s)) * kernel(s);
    let origin = n.origin_exponent();
    let Some(e) = origin.filter(|_| breaks.len() >= 2 && breaks[0] == 0.0) else {
        let out = integrate_panels(f, &breaks, p.rel_tol, p.max_subdivisions)?;
        return check_outcome(out, p.rel_tol);
    };
    let b = breaks[1].min((2.0 * tau).sqrt());
    if b < breaks[1] {
        breaks[0] = b;
    } else {
        breaks.remove(0);
    }
    let m = 1.0 / (e + 1.0);
    let ln_scale = m.ln() + (e + 1.0) * b.ln();
    let g = |w: f64| {
        let s = b * w.powf(m);
        // h is continuous at 0; hold it below the normal range
        let sh = s.max(1e-290);
        let h = n.density_at(sh) * sh.powf(-e);
        LogValue::from_f64(h).scale_log(ln_scale) * kernel(s)
    };
    let head = integrate_panels(g, &[0.0, 1.0], p.rel_tol, p.max_subdivisions)?;
    let mut acc = LogSum::new();
    acc.push(check_outcome(head, p.rel_tol)?);
    if breaks.len() >= 2 {
        let rest = integrate_panels(f, &breaks, p.rel_tol, p.max_subdivisions)?;
        acc.push(check_outcome(rest, p.rel_tol)?);
    }
    Ok(acc.value())
}

/// `u(x, t) = int K(x, y(s), t) dn(s)`, the Stieltjes form over the ray.
///
/// Point masses are summed exactly; the absolutely continuous part is
/// integrated over a window of `truncation_sigmas` diffusion lengths around
/// the peak of the integrand, plus the stretch between the support start and
/// that window. The measure is assumed to satisfy the tail condition at
/// `kappa t`, which holds for every catalog counting function.
pub fn temperature_stieltjes(
    n: &CountingFunction,
    ray: &RayGeometry,
    x: &FieldPoint,
    t: f64,
    p: &EvalParams,
) -> Result<LogValue> {
    let tau = p.tau(t)?;
    if n.is_zero() {
        return Ok(LogValue::ZERO);
    }
    let g = Geometry::new(x, ray);
    let shift = ln_norm(tau) - g.perp_sq / (4.0 * tau);

    let mut acc = LogSum::new();
    for (s, m) in n.point_masses() {
        acc.push(LogValue::from_log(
            m.ln() - (s - g.along).powi(2) / (4.0 * tau),
        ));
    }

    if n.has_density() {
        let floor = n.support_start();
        let e = n.growth_exponent() - 1.0;
        let (lo, peak, hi) = window(g.along, floor, tau, e, p.truncation_sigmas);
        let mut breaks = vec![floor];
        push_break(&mut breaks, lo);
        push_break(&mut breaks, peak);
        push_break(&mut breaks, hi);
        let kernel = |s: f64| LogValue::from_log(-(s - g.along).powi(2) / (4.0 * tau));
        acc.push(integrate_density(n, kernel, breaks, tau, p)?);
    }
    Ok(acc.value().scale_log(shift))
}

/// `u(x, t)` through the integrated-by-parts form
/// `int (s - r cos D) / (2 tau) K(x, y(s), t) n(s) ds`.
///
/// The factor `s - r cos D` changes sign once; the two sides are integrated
/// as positive integrals and subtracted in log form. Atomic measures are
/// rejected.
pub fn temperature_parts(
    n: &CountingFunction,
    ray: &RayGeometry,
    x: &FieldPoint,
    t: f64,
    p: &EvalParams,
) -> Result<LogValue> {
    let tau = p.tau(t)?;
    if let CountingFunction::Atoms(_) = n {
        return Err(Error::validation(
            "the integrated-by-parts form needs a continuous counting function",
        ));
    }
    if n.is_zero() {
        return Ok(LogValue::ZERO);
    }
    let g = Geometry::new(x, ray);
    let shift = ln_norm(tau) - g.perp_sq / (4.0 * tau) - (2.0 * tau).ln();
    let floor = n.support_start();
    let e = n.growth_exponent() + 1.0;
    let c = g.along;
    let sigma = (2.0 * tau).sqrt();
    // the two halves cancel to O(sigma / r), so each is resolved more tightly
    let tol = (p.rel_tol * 1e-2).max(1e-14);

    let side = |s: f64| {
        let lead = (s - c).abs();
        if lead == 0.0 {
            return LogValue::ZERO;
        }
        let nv = n.eval(s);
        if nv <= 0.0 {
            return LogValue::ZERO;
        }
        LogValue::from_log(lead.ln() + nv.ln() - (s - c).powi(2) / (4.0 * tau))
    };

    let (_, peak, hi) = window(c, floor.max(c), tau, e, p.truncation_sigmas);
    let mut upper = vec![floor.max(c)];
    push_break(&mut upper, (c + sigma).max(floor));
    push_break(&mut upper, peak);
    push_break(&mut upper, hi);
    let positive = check_outcome(
        integrate_panels(side, &upper, tol, p.max_subdivisions)?,
        tol,
    )?;

    let negative = if c > floor {
        let lo = (c - p.truncation_sigmas * sigma).max(floor);
        let mut lower = vec![floor];
        push_break(&mut lower, lo);
        push_break(&mut lower, c - sigma);
        push_break(&mut lower, c);
        check_outcome(
            integrate_panels(side, &lower, tol, p.max_subdivisions)?,
            tol,
        )?
    } else {
        LogValue::ZERO
    };

    let total = positive - negative;
    if total.sign() < 0 {
        return Err(Error::numerical(
            "integrated-by-parts form produced a negative temperature",
        ));
    }
    Ok(total.scale_log(shift))
}

/// `u(0, t) = (1 / 4 pi tau) int (s / 2 tau) n(s) exp(-s^2 / 4 tau) ds`.
///
/// Atomic measures fall back to the Stieltjes form at the origin.
pub fn temperature_on_axis(n: &CountingFunction, t: f64, p: &EvalParams) -> Result<LogValue> {
    let tau = p.tau(t)?;
    if let CountingFunction::Atoms(_) = n {
        return temperature_stieltjes(n, &RayGeometry::default(), &FieldPoint::origin(), t, p);
    }
    if n.is_zero() {
        return Ok(LogValue::ZERO);
    }
    let floor = n.support_start();
    let e = n.growth_exponent() + 1.0;
    let (lo, peak, hi) = window(0.0, floor, tau, e, p.truncation_sigmas);
    let mut breaks = vec![floor];
    push_break(&mut breaks, lo);
    push_break(&mut breaks, peak);
    push_break(&mut breaks, hi);
    let f = |s: f64| {
        let nv = n.eval(s);
        if nv <= 0.0 || s <= 0.0 {
            return LogValue::ZERO;
        }
        LogValue::from_log(s.ln() + nv.ln() - s * s / (4.0 * tau))
    };
    let out = integrate_panels(f, &breaks, p.rel_tol, p.max_subdivisions)?;
    Ok(check_outcome(out, p.rel_tol)?.scale_log(ln_norm(tau) - (2.0 * tau).ln()))
}

/// `int_0^{2 pi} u((rho, phi), t) dphi`, using
/// `int exp(a cos phi) dphi = 2 pi I0(a)` to do the angular integral in
/// closed form. Returned in linear scale.
pub fn angular_integral(n: &CountingFunction, rho: f64, t: f64, p: &EvalParams) -> Result<f64> {
    let tau = p.tau(t)?;
    if n.is_zero() {
        return Ok(0.0);
    }
    // exp(-(rho^2 + s^2) / 4tau) I0(rho s / 2tau) = exp(-(rho - s)^2 / 4tau) I0e(.)
    let kernel = |s: f64| {
        let z = rho * s / (2.0 * tau);
        LogValue::from_log(bessel_i0e(z).ln() - (rho - s).powi(2) / (4.0 * tau))
    };
    let mut acc = LogSum::new();
    for (s, m) in n.point_masses() {
        acc.push(kernel(s).scale_log(m.ln()));
    }
    if n.has_density() {
        let floor = n.support_start();
        let e = n.growth_exponent() - 1.0;
        let (lo, peak, hi) = window(rho, floor, tau, e.max(0.0), p.truncation_sigmas);
        let mut breaks = vec![floor];
        push_break(&mut breaks, lo);
        push_break(&mut breaks, peak);
        push_break(&mut breaks, hi);
        acc.push(integrate_density(n, kernel, breaks, tau, p)?);
    }
    Ok(acc.value().scale_log(-(2.0 * tau).ln()).to_f64())
}

/// A measure on a ray together with the evaluation settings, viewed as a
/// temperature field `u(x, t)`.
#[derive(Debug, Clone)]
pub struct RayTemperature {
    pub measure: CountingFunction,
    pub ray: RayGeometry,
    pub params: EvalParams,
}

impl RayTemperature {
    pub fn new(measure: CountingFunction, ray: RayGeometry, params: EvalParams) -> Self {
        RayTemperature {
            measure,
            ray,
            params,
        }
    }

    pub fn log_u(&self, x: &FieldPoint, t: f64) -> Result<LogValue> {
        temperature_stieltjes(&self.measure, &self.ray, x, t, &self.params)
    }
}
