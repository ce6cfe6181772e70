//! Small-time recovery of the mass function from the temperature.
//!
//! The mass of the disk `|y| <= r` is the `t -> 0+` limit of
//! `int_{|y| <= r} u(y, t) dy`. Disk integrals are computed in polar
//! coordinates over a geometric sequence of times and extrapolated to
//! `t = 0` with a Richardson table in powers of `t`.

use std::cell::RefCell;
use std::f64::consts::{PI, TAU};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::kernel::{angular_integral, EvalParams, RayTemperature};
use crate::logval::LogValue;
use crate::measure::{CountingFunction, FieldPoint};
use crate::quadrature::integrate_panels;

/// A temperature field `u(x, t)` that can be integrated over disks.
pub trait Temperature: Sync {
    fn log_u(&self, x: &FieldPoint, t: f64) -> Result<LogValue>;

    /// Direction along which `u` concentrates for small `t`, if known.
    fn concentration_angle(&self) -> Option<f64> {
        None
    }

    /// Diffusivity `kappa`; sets the angular window width.
    fn diffusivity(&self) -> f64 {
        1.0
    }

    /// Radii where the radial profile of `u` has sharp features.
    fn radial_breakpoints(&self) -> Vec<f64> {
        Vec::new()
    }

    /// True when `u` vanishes identically.
    fn is_zero(&self) -> bool {
        false
    }

    /// `int_0^{2 pi} u((rho, phi), t) dphi`.
    fn angular_integral(&self, rho: f64, t: f64, p: &EvalParams) -> Result<f64> {
        polar_angular_integral(self, rho, t, p)
    }
}

impl Temperature for RayTemperature {
    fn log_u(&self, x: &FieldPoint, t: f64) -> Result<LogValue> {
        RayTemperature::log_u(self, x, t)
    }

    fn concentration_angle(&self) -> Option<f64> {
        Some(self.ray.theta0())
    }

    fn diffusivity(&self) -> f64 {
        self.params.kappa
    }

    fn radial_breakpoints(&self) -> Vec<f64> {
        let mut b: Vec<f64> = self.measure.point_masses().iter().map(|a| a.0).collect();
        b.push(self.measure.support_start());
        b
    }

    fn is_zero(&self) -> bool {
        self.measure.is_zero()
    }

    /// Closed-form angular integration through `I0`.
    fn angular_integral(&self, rho: f64, t: f64, p: &EvalParams) -> Result<f64> {
        let p = EvalParams {
            kappa: self.params.kappa,
            ..*p
        };
        angular_integral(&self.measure, rho, t, &p)
    }
}

/// Wraps a temperature so that disk integrals always take the generic
/// numerical angular quadrature.
pub struct PolarQuadrature<'a, T: Temperature + ?Sized>(pub &'a T);

impl<T: Temperature + ?Sized> Temperature for PolarQuadrature<'_, T> {
    fn log_u(&self, x: &FieldPoint, t: f64) -> Result<LogValue> {
        self.0.log_u(x, t)
    }
    fn concentration_angle(&self) -> Option<f64> {
        self.0.concentration_angle()
    }
    fn diffusivity(&self) -> f64 {
        self.0.diffusivity()
    }
    fn radial_breakpoints(&self) -> Vec<f64> {
        self.0.radial_breakpoints()
    }
    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
}

/// Numerical `int_0^{2 pi} u((rho, phi), t) dphi`, with panels centred on
/// the concentration angle and sized by the angular diffusion width
/// `sqrt(2 kappa t) / rho`.
pub fn polar_angular_integral<T: Temperature + ?Sized>(
    u: &T,
    rho: f64,
    t: f64,
    p: &EvalParams,
) -> Result<f64> {
    let failure = RefCell::new(None);
    let f = |phi: f64| match FieldPoint::new(rho, phi).and_then(|x| u.log_u(&x, t)) {
        Ok(v) => v,
        Err(e) => {
            failure.borrow_mut().get_or_insert(e);
            LogValue::ZERO
        }
    };
    let breaks: Vec<f64> = match u.concentration_angle() {
        Some(theta0) if rho > 0.0 => {
            let width =
                (p.truncation_sigmas * (2.0 * u.diffusivity() * t).sqrt() / rho).min(0.5 * PI);
            vec![
                theta0 - PI,
                theta0 - width,
                theta0,
                theta0 + width,
                theta0 + PI,
            ]
        }
        _ => (0..=8).map(|k| k as f64 * TAU / 8.0).collect(),
    };
    let out = integrate_panels(f, &breaks, p.rel_tol, p.max_subdivisions)?;
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    Ok(out.value.to_f64())
}

/// `int_{|y| <= r} u(y, t) dy` in polar coordinates.
pub fn disk_mass<T: Temperature + ?Sized>(u: &T, r: f64, t: f64, p: &EvalParams) -> Result<f64> {
    if !(r.is_finite() && r > 0.0) {
        return Err(Error::validation(format!(
            "disk radius must be > 0, got {r}"
        )));
    }
    if !(t.is_finite() && t > 0.0) {
        return Err(Error::validation(format!("t must be > 0, got {t}")));
    }
    if u.is_zero() {
        return Ok(0.0);
    }
    let sigma = (2.0 * u.diffusivity() * t).sqrt();
    let mut breaks = vec![0.0, r];
    for b in u.radial_breakpoints() {
        for x in [
            b - p.truncation_sigmas * sigma,
            b,
            b + p.truncation_sigmas * sigma,
        ] {
            if x > 0.0 && x < r {
                breaks.push(x);
            }
        }
    }
    breaks.sort_by(|a, b| a.total_cmp(b));
    breaks.dedup();

    let failure = RefCell::new(None);
    let f = |rho: f64| {
        if rho == 0.0 {
            return LogValue::ZERO;
        }
        match u.angular_integral(rho, t, p) {
            Ok(g) => LogValue::from_f64(rho * g),
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                LogValue::ZERO
            }
        }
    };
    let out = integrate_panels(f, &breaks, p.rel_tol, p.max_subdivisions)?;
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    Ok(out.value.to_f64())
}

/// Radii and time schedule for a recovery run.
#[derive(Debug, Clone, PartialEq)]
pub struct RecoverySpec {
    pub radii: Vec<f64>,
    pub t_sequence: Vec<f64>,
    pub extrapolation_order: usize,
}

/// Default time ratio, number of times and Richardson order.
pub const DEFAULT_T_RATIO: f64 = 0.5;
pub const DEFAULT_T_COUNT: usize = 6;
pub const DEFAULT_ORDER: usize = 2;

impl RecoverySpec {
    pub fn new(radii: Vec<f64>, t_sequence: Vec<f64>, extrapolation_order: usize) -> Result<Self> {
        let spec = RecoverySpec {
            radii,
            t_sequence,
            extrapolation_order,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// `t_k = t_start ratio^k`, `k < count`.
    pub fn geometric(
        radii: Vec<f64>,
        t_start: f64,
        ratio: f64,
        count: usize,
        order: usize,
    ) -> Result<Self> {
        if !(ratio > 0.0 && ratio < 1.0) {
            return Err(Error::validation("t ratio must lie in (0, 1)"));
        }
        let ts = (0..count).map(|k| t_start * ratio.powi(k as i32)).collect();
        Self::new(radii, ts, order)
    }

    /// The default schedule: six times halving from `0.04 r_min^2`, order 2.
    pub fn default_for(radii: Vec<f64>) -> Result<Self> {
        let r_min = radii.iter().cloned().fold(f64::INFINITY, f64::min);
        Self::geometric(
            radii,
            0.04 * r_min * r_min,
            DEFAULT_T_RATIO,
            DEFAULT_T_COUNT,
            DEFAULT_ORDER,
        )
    }

    pub fn validate(&self) -> Result<()> {
        if self.radii.is_empty() {
            return Err(Error::validation("at least one radius is required"));
        }
        if self.radii.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
            return Err(Error::validation("radii must be positive"));
        }
        if self.radii.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::validation("radii must be strictly increasing"));
        }
        let ts = &self.t_sequence;
        if ts.len() < self.extrapolation_order + 2 {
            return Err(Error::validation(format!(
                "order {} extrapolation needs at least {} times",
                self.extrapolation_order,
                self.extrapolation_order + 2
            )));
        }
        if ts.iter().any(|t| !(t.is_finite() && *t > 0.0)) {
            return Err(Error::validation("times must be positive"));
        }
        if ts.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::validation("times must be strictly decreasing"));
        }
        let rho = ts[1] / ts[0];
        if ts
            .windows(2)
            .any(|w| ((w[1] / w[0]) / rho - 1.0).abs() > 1e-12)
        {
            return Err(Error::validation("times must form a geometric sequence"));
        }
        Ok(())
    }

    pub fn ratio(&self) -> f64 {
        self.t_sequence[1] / self.t_sequence[0]
    }
}

/// Richardson table for `m(t) = m0 + c1 t + c2 t^2 + ...` sampled at
/// `t_k = t_0 rho^k`. Row `k`, column `j` eliminates the first `j` powers.
pub fn richardson_table(values: &[f64], rho: f64, order: usize) -> Vec<Vec<f64>> {
    let mut table: Vec<Vec<f64>> = Vec::with_capacity(values.len());
    for (k, &v) in values.iter().enumerate() {
        let mut row = vec![v];
        for j in 1..=order.min(k) {
            let f = rho.powi(j as i32);
            let prev = &table[k - 1];
            row.push((row[j - 1] - f * prev[j - 1]) / (1.0 - f));
        }
        table.push(row);
    }
    table
}

/// Extrapolated disk mass at one radius.
#[derive(Debug, Clone, PartialEq)]
pub struct RecoveredMass {
    pub r: f64,
    /// `(t, disk_mass)` in schedule order.
    pub raw: Vec<(f64, f64)>,
    pub value: f64,
    /// Difference between the last two entries of the final column.
    pub diagnostic: f64,
}

/// Estimates `lim_{t -> 0+} disk_mass(u, r, t)`.
pub fn recover_mass<T: Temperature + ?Sized>(
    u: &T,
    r: f64,
    spec: &RecoverySpec,
    p: &EvalParams,
) -> Result<RecoveredMass> {
    spec.validate()?;
    let raw: Vec<(f64, f64)> = spec
        .t_sequence
        .par_iter()
        .map(|&t| disk_mass(u, r, t, p).map(|m| (t, m)))
        .collect::<Result<_>>()?;
    extrapolate(r, raw, spec)
}

fn extrapolate(r: f64, raw: Vec<(f64, f64)>, spec: &RecoverySpec) -> Result<RecoveredMass> {
    let values: Vec<f64> = raw.iter().map(|x| x.1).collect();
    let scale = values.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let slack = 1e-9 * scale;
    let up = values.windows(2).all(|w| w[1] >= w[0] - slack);
    let down = values.windows(2).all(|w| w[1] <= w[0] + slack);
    if !(up || down) {
        return Err(Error::Numerical {
            message: format!("disk masses at r = {r} are not monotone in t: {values:?}"),
            estimate: values.last().copied(),
            error_estimate: None,
        });
    }
    let order = spec.extrapolation_order;
    let table = richardson_table(&values, spec.ratio(), order);
    let last = table.len() - 1;
    let value = table[last][order];
    let diagnostic = (table[last][order] - table[last - 1][order]).abs();
    Ok(RecoveredMass {
        r,
        raw,
        value,
        diagnostic,
    })
}

/// Per-radius recoveries plus the fitted power law.
#[derive(Debug, Clone, PartialEq)]
pub struct RecoveryReport {
    pub masses: Vec<RecoveredMass>,
    /// `(a0_hat, alpha_hat)` when at least three positive masses were found.
    pub fit: Option<(f64, f64)>,
    /// `|m_hat / n(r) - 1|` per radius when the true counting function is
    /// known; `|m_hat|` where `n(r) = 0`.
    pub relative_errors: Option<Vec<f64>>,
}

/// Runs [`recover_mass`] at every radius of `spec` and fits the result.
pub fn recover<T: Temperature + ?Sized>(
    u: &T,
    spec: &RecoverySpec,
    p: &EvalParams,
    truth: Option<&CountingFunction>,
) -> Result<RecoveryReport> {
    let masses: Vec<RecoveredMass> = spec
        .radii
        .iter()
        .map(|&r| recover_mass(u, r, spec, p))
        .collect::<Result<_>>()?;
    let pairs: Vec<(f64, f64)> = masses.iter().map(|m| (m.r, m.value)).collect();
    let fit = fit_power_law(&pairs).ok();
    let relative_errors = truth.map(|n| {
        masses
            .iter()
            .map(|m| match n.eval(m.r) {
                truth if truth > 0.0 => (m.value / truth - 1.0).abs(),
                _ => m.value.abs(),
            })
            .collect()
    });
    Ok(RecoveryReport {
        masses,
        fit,
        relative_errors,
    })
}

/// Least squares of `ln m = ln a0 + alpha ln r`; returns `(a0, alpha)`.
pub fn fit_power_law(pairs: &[(f64, f64)]) -> Result<(f64, f64)> {
    if pairs.len() < 3 {
        return Err(Error::validation(format!(
            "power-law fit needs at least 3 pairs, got {}",
            pairs.len()
        )));
    }
    if let Some(&(r, m)) = pairs.iter().find(|&&(r, m)| !(r > 0.0 && m > 0.0)) {
        return Err(Error::validation(format!(
            "power-law fit needs positive radii and masses, got ({r}, {m})"
        )));
    }
    let n = pairs.len() as f64;
    let xs: Vec<f64> = pairs.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = pairs.iter().map(|p| p.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx <= 1e-24 * (1.0 + mx * mx) {
        return Err(Error::validation(
            "power-law fit needs at least two distinct radii",
        ));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let alpha = sxy / sxx;
    Ok(((my - alpha * mx).exp(), alpha))
}

/// A function with one-sided limits everywhere.
#[derive(Debug, Clone, PartialEq)]
pub enum Piecewise {
    Constant(f64),
    /// `left` below `at`, `right` from `at` on.
    Step {
        at: f64,
        left: f64,
        right: f64,
    },
    /// `coeff * x^exponent` for `x > 0`, zero otherwise.
    Power {
        coeff: f64,
        exponent: f64,
    },
    Counting(CountingFunction),
    /// `sum_i w_i f_i`.
    Combination(Vec<(f64, Piecewise)>),
}

impl Piecewise {
    pub fn left_limit(&self, x: f64) -> f64 {
        match self {
            Piecewise::Constant(c) => *c,
            Piecewise::Step { at, left, right } => {
                if x <= *at {
                    *left
                } else {
                    *right
                }
            }
            Piecewise::Power { coeff, exponent } => power(*coeff, *exponent, x),
            Piecewise::Counting(n) => n.eval_left(x),
            Piecewise::Combination(parts) => parts.iter().map(|(w, f)| w * f.left_limit(x)).sum(),
        }
    }

    pub fn right_limit(&self, x: f64) -> f64 {
        match self {
            Piecewise::Constant(c) => *c,
            Piecewise::Step { at, left, right } => {
                if x < *at {
                    *left
                } else {
                    *right
                }
            }
            Piecewise::Power { coeff, exponent } => power(*coeff, *exponent, x),
            Piecewise::Counting(n) => n.eval(x),
            Piecewise::Combination(parts) => parts.iter().map(|(w, f)| w * f.right_limit(x)).sum(),
        }
    }
}

fn power(coeff: f64, exponent: f64, x: f64) -> f64 {
    if x > 0.0 {
        coeff * x.powf(exponent)
    } else {
        0.0
    }
}

/// `[f](x) = (f(x+) + f(x-)) / 2`.
pub fn segment_mean(f: &Piecewise, x: f64) -> f64 {
    0.5 * (f.left_limit(x) + f.right_limit(x))
}

/// An angular density `A(theta)` on `[0, 2 pi)` with a known integral.
pub trait AngularProfile {
    fn value(&self, theta: f64) -> f64;
    /// `int_0^{2 pi} A(theta) dtheta`.
    fn integral(&self) -> f64;
}

/// `A(theta) = a0 + sum_k (c_k cos k theta + s_k sin k theta)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigProfile {
    pub mean: f64,
    pub cos: Vec<f64>,
    pub sin: Vec<f64>,
}

impl AngularProfile for TrigProfile {
    fn value(&self, theta: f64) -> f64 {
        let c: f64 = self
            .cos
            .iter()
            .enumerate()
            .map(|(k, a)| a * ((k + 1) as f64 * theta).cos())
            .sum();
        let s: f64 = self
            .sin
            .iter()
            .enumerate()
            .map(|(k, b)| b * ((k + 1) as f64 * theta).sin())
            .sum();
        self.mean + c + s
    }

    fn integral(&self) -> f64 {
        TAU * self.mean
    }
}

/// Both sides of `int_{|y| <= r} A(theta) |y|^rho dy = r^(rho+2) / (rho+2) int A`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentIdentity {
    pub lhs: f64,
    pub rhs: f64,
    pub rel_diff: f64,
}

/// Left side: radial integral in closed form, angular integral by the
/// trapezoidal rule on `samples` equispaced angles. Right side: closed form
/// with the exact angular integral.
pub fn angular_moment_identity(
    a: &dyn AngularProfile,
    samples: usize,
    rho: f64,
    r: f64,
) -> Result<MomentIdentity> {
    if !(rho > -2.0) {
        return Err(Error::validation(format!("rho must be > -2, got {rho}")));
    }
    if !(r.is_finite() && r > 0.0) {
        return Err(Error::validation("r must be > 0"));
    }
    if samples < 2 {
        return Err(Error::validation("need at least 2 angular samples"));
    }
    let radial = r.powf(rho + 2.0) / (rho + 2.0);
    let h = TAU / samples as f64;
    let angular: f64 = (0..samples).map(|k| a.value(k as f64 * h)).sum::<f64>() * h;
    let lhs = radial * angular;
    let rhs = radial * a.integral();
    let rel_diff = if rhs == 0.0 {
        lhs.abs()
    } else {
        (lhs / rhs - 1.0).abs()
    };
    Ok(MomentIdentity { lhs, rhs, rel_diff })
}

/// `M(r, t) = r^-alpha int_0^r v(y, t) dy` on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct UniformityScan {
    /// `(r, t, M(r, t))`, radius-major.
    pub table: Vec<(f64, f64, f64)>,
    /// `(r, sup_t |M(r, t)|)`.
    pub sup_by_radius: Vec<(f64, f64)>,
    pub passed: bool,
}

/// Checks the uniform-in-`t` vanishing of `r^-alpha int_0^r v(y, t) dy` on a
/// finite grid: passes when `sup_t |M|` is nonincreasing over the last three
/// radii and ends below `threshold`.
pub fn remainder_uniformity_scan<V>(
    v: V,
    alpha: f64,
    r_grid: &[f64],
    t_grid: &[f64],
    threshold: f64,
) -> Result<UniformityScan>
where
    V: Fn(f64, f64) -> f64 + Sync,
{
    if r_grid.len() < 3 {
        return Err(Error::validation("the scan needs at least 3 radii"));
    }
    if r_grid.windows(2).any(|w| w[1] <= w[0]) || r_grid[0] <= 0.0 {
        return Err(Error::validation("radii must be positive and increasing"));
    }
    if t_grid.is_empty() {
        return Err(Error::validation("the scan needs at least one time"));
    }
    let mut table = Vec::with_capacity(r_grid.len() * t_grid.len());
    let mut sup_by_radius = Vec::with_capacity(r_grid.len());
    for &r in r_grid {
        let mut sup = 0.0f64;
        for &t in t_grid {
            let out = integrate_panels(|y| LogValue::from_f64(v(y, t)), &[0.0, r], 1e-10, 60)?;
            let m = out.value.to_f64() * r.powf(-alpha);
            if !m.is_finite() {
                return Err(Error::numerical(format!("M({r}, {t}) is not finite")));
            }
            sup = sup.max(m.abs());
            table.push((r, t, m));
        }
        sup_by_radius.push((r, sup));
    }
    let tail = &sup_by_radius[sup_by_radius.len() - 3..];
    let passed = tail.windows(2).all(|w| w[1].1 <= w[0].1) && tail[2].1 < threshold;
    Ok(UniformityScan {
        table,
        sup_by_radius,
        passed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::{Atoms, Mode, PowerLaw, RayGeometry};

    fn ray_temp(n: CountingFunction) -> RayTemperature {
        RayTemperature::new(n, RayGeometry::new(0.4).unwrap(), EvalParams::default())
    }

    #[test]
    fn richardson_removes_polynomial_terms() {
        let ts: Vec<f64> = (0..5).map(|k| 0.1 * 0.5f64.powi(k)).collect();
        let vals: Vec<f64> = ts.iter().map(|t| 3.0 + 2.0 * t - 5.0 * t * t).collect();
        let table = richardson_table(&vals, 0.5, 2);
        assert!((table[4][2] - 3.0).abs() < 1e-13);
    }

    #[test]
    fn fit_exact_power_law() {
        let pairs: Vec<(f64, f64)> = [1.0, 2.0, 4.0].iter().map(|&r| (r, 3.0 * r * r)).collect();
        let (a, al) = fit_power_law(&pairs).unwrap();
        assert!((a - 3.0).abs() < 1e-12 && (al - 2.0).abs() < 1e-12);
    }

    #[test]
    fn fit_rejects_degenerate_and_nonpositive() {
        assert!(fit_power_law(&[(2.0, 1.0), (2.0, 1.5), (2.0, 2.0)])
            .unwrap_err()
            .is_validation());
        assert!(fit_power_law(&[(1.0, 1.0), (2.0, 0.0), (3.0, 2.0)]).is_err());
        assert!(fit_power_law(&[(1.0, 1.0), (2.0, 2.0)]).is_err());
    }

    #[test]
    fn segment_mean_examples() {
        let step = Piecewise::Step {
            at: 1.5,
            left: 0.0,
            right: 1.0,
        };
        assert_eq!(segment_mean(&step, 1.5), 0.5);
        assert_eq!(segment_mean(&step, 1.0), 0.0);
        let sq = Piecewise::Power {
            coeff: 1.0,
            exponent: 2.0,
        };
        assert_eq!(segment_mean(&sq, 3.0), 9.0);
        let atoms = Piecewise::Counting(Atoms::new(vec![(2.0, 4.0)]).unwrap().into());
        assert_eq!(segment_mean(&atoms, 2.0), 2.0);
    }

    #[test]
    fn moment_identity_examples() {
        let one = TrigProfile {
            mean: 1.0,
            cos: vec![],
            sin: vec![],
        };
        let m = angular_moment_identity(&one, 64, 0.0, 2.0).unwrap();
        assert!((m.lhs - 4.0 * PI).abs() < 1e-12 && (m.rhs - 4.0 * PI).abs() < 1e-12);
        let a = TrigProfile {
            mean: 1.0,
            cos: vec![1.0],
            sin: vec![],
        };
        let m = angular_moment_identity(&a, 4096, 1.0, 1.0).unwrap();
        assert!((m.rhs - TAU / 3.0).abs() < 1e-14);
        assert!(m.rel_diff < 1e-10);
        assert!(angular_moment_identity(&a, 16, -2.0, 1.0).is_err());
    }

    #[test]
    fn spec_validation() {
        assert!(RecoverySpec::new(vec![1.0], vec![0.1, 0.05], 2).is_err());
        assert!(RecoverySpec::new(vec![1.0], vec![0.1, 0.05, 0.01, 0.005], 2).is_err());
        assert!(RecoverySpec::new(vec![2.0, 1.0], vec![0.1, 0.05, 0.025, 0.0125], 2).is_err());
        assert!(RecoverySpec::geometric(vec![1.0, 2.0], 0.1, 0.5, 4, 2).is_ok());
    }

    #[test]
    fn zero_measure_has_zero_disk_mass() {
        let u = ray_temp(PowerLaw::new(0.0, 1.0, 0.0, Mode::Density).unwrap().into());
        assert_eq!(
            disk_mass(&u, 2.0, 0.01, &EvalParams::default()).unwrap(),
            0.0
        );
        let spec = RecoverySpec::default_for(vec![2.0]).unwrap();
        let m = recover_mass(&u, 2.0, &spec, &EvalParams::default()).unwrap();
        assert_eq!(m.value, 0.0);
    }

    #[test]
    fn atom_inside_disk_carries_its_mass() {
        let u = ray_temp(Atoms::new(vec![(1.0, 1.0)]).unwrap().into());
        let m = disk_mass(&u, 2.0, 0.01, &EvalParams::default()).unwrap();
        assert!((m - 1.0).abs() < 1e-9, "{m}");
        let m = disk_mass(&u, 0.5, 0.001, &EvalParams::default()).unwrap();
        assert!(m < 1e-9, "{m}");
    }

    #[test]
    fn numeric_polar_path_matches_closed_angular_form() {
        let u = ray_temp(PowerLaw::new(1.0, 1.0, 0.0, Mode::Density).unwrap().into());
        let p = EvalParams {
            rel_tol: 1e-9,
            ..EvalParams::default()
        };
        let fast = disk_mass(&u, 1.5, 0.02, &p).unwrap();
        let slow = disk_mass(&PolarQuadrature(&u), 1.5, 0.02, &p).unwrap();
        assert!((fast / slow - 1.0).abs() < 1e-7, "{fast} vs {slow}");
    }

    #[test]
    fn uniformity_scan_examples() {
        let rs = [10.0, 100.0, 1000.0, 10000.0];
        let ts = [0.01, 0.1];
        let zero = remainder_uniformity_scan(|_, _| 0.0, 3.0, &rs, &ts, 0.1).unwrap();
        assert!(zero.passed);
        assert!(zero.table.iter().all(|x| x.2 == 0.0));
        let mild = remainder_uniformity_scan(|y, _| y.powf(1.5), 3.0, &rs, &ts, 0.1).unwrap();
        assert!(mild.passed);
        let expect = 10000f64.powf(-0.5) / 2.5;
        assert!((mild.sup_by_radius[3].1 / expect - 1.0).abs() < 1e-8);
        let grows = remainder_uniformity_scan(|y, _| y.powf(3.0), 3.0, &rs, &ts, 0.1).unwrap();
        assert!(!grows.passed);
    }
}
