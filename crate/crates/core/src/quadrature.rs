//! Adaptive log-domain quadrature.
//!
//! Each panel is integrated with the tanh-sinh (double exponential) rule,
//! halving the step until two successive levels agree to the requested
//! relative tolerance. Panels that fail to settle are bisected. The
//! double-exponential node clustering makes integrable endpoint
//! singularities such as `s^-1/2` cheap, and peaks placed on panel
//! boundaries (via `peak_hint` or explicit breakpoints) are resolved the
//! same way.

use std::f64::consts::FRAC_PI_2;
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::kernel::EvalParams;
use crate::logval::{LogSum, LogValue};

const BASE_STEP: f64 = 0.5;
/// Outermost abscissa; at 6 the nodes reach ~1e-275 of the panel width from
/// the ends, so mass lost next to an `s^-0.9` endpoint is below 1e-26.
const T_MAX: f64 = 6.0;
const MIN_LEVEL: usize = 3;
const MAX_LEVEL: usize = 7;

/// Result of a quadrature call.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadOutcome {
    pub value: LogValue,
    /// Estimated relative error of `value` (0 when `value` is exactly zero).
    pub rel_error: f64,
    pub evaluations: usize,
    pub subdivisions: usize,
}

#[derive(Debug, Clone, Copy)]
struct Node {
    /// `1 - |x|` on the reference interval [-1, 1]; 1 marks the centre.
    comp: f64,
    ln_weight: f64,
}

fn ln_cosh(y: f64) -> f64 {
    let y = y.abs();
    y + (-2.0 * y).exp().ln_1p() - std::f64::consts::LN_2
}

fn node_at(t: f64) -> Node {
    let u = FRAC_PI_2 * t.sinh();
    let e = (-2.0 * u.abs()).exp();
    Node {
        comp: 2.0 * e / (1.0 + e),
        ln_weight: FRAC_PI_2.ln() + ln_cosh(t) - 2.0 * ln_cosh(u),
    }
}

fn levels() -> &'static [Vec<Node>] {
    static TABLE: OnceLock<Vec<Vec<Node>>> = OnceLock::new();
    TABLE.get_or_init(|| {
        (0..=MAX_LEVEL)
            .map(|level| {
                let h = BASE_STEP / (1u64 << level) as f64;
                let kmax = (T_MAX / h).round() as i64;
                if level == 0 {
                    (0..=kmax).map(|k| node_at(k as f64 * h)).collect()
                } else {
                    (1..=kmax)
                        .step_by(2)
                        .map(|k| node_at(k as f64 * h))
                        .collect()
                }
            })
            .collect()
    })
}

struct PanelState {
    a: f64,
    b: f64,
    sum: LogSum,
    level: usize,
    current: LogValue,
    previous: LogValue,
    evaluations: usize,
}

impl PanelState {
    fn new(a: f64, b: f64) -> Self {
        PanelState {
            a,
            b,
            sum: LogSum::new(),
            level: 0,
            current: LogValue::ZERO,
            previous: LogValue::ZERO,
            evaluations: 0,
        }
    }

    /// Adds the nodes of the next level.
    fn refine<F: Fn(f64) -> LogValue>(&mut self, f: &F) {
        let table = levels();
        let level = if self.evaluations == 0 {
            0
        } else {
            self.level + 1
        };
        let half = 0.5 * (self.b - self.a);
        let mid = 0.5 * (self.a + self.b);
        let ln_half = half.ln();
        for node in &table[level] {
            let lw = ln_half + node.ln_weight;
            if node.comp == 1.0 {
                self.sum.push(f(mid).scale_log(lw));
                self.evaluations += 1;
            } else if node.comp > 0.0 {
                let d = half * node.comp;
                self.sum.push(f(self.a + d).scale_log(lw));
                self.sum.push(f(self.b - d).scale_log(lw));
                self.evaluations += 2;
            }
        }
        self.level = level;
        self.previous = self.current;
        let h = BASE_STEP / (1u64 << level) as f64;
        self.current = self.sum.value().scale_log(h.ln());
    }

    fn abs_error(&self) -> LogValue {
        (self.current - self.previous).abs()
    }
}

/// Integrates `f` over `[a, b]` with the integrand given in log form.
///
/// When `peak_hint` lies strictly inside the interval it becomes a panel
/// boundary. Both bounds must be finite; callers truncate infinite ranges.
pub fn quadrature_log<F>(
    f: F,
    a: f64,
    b: f64,
    peak_hint: Option<f64>,
    p: &EvalParams,
) -> Result<QuadOutcome>
where
    F: Fn(f64) -> LogValue,
{
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::validation("quadrature bounds must be finite"));
    }
    if a >= b {
        return Err(Error::validation(format!(
            "quadrature interval ({a}, {b}) is empty"
        )));
    }
    let mut breaks = vec![a];
    if let Some(c) = peak_hint {
        if c > a && c < b {
            breaks.push(c);
        }
    }
    breaks.push(b);
    integrate_panels(f, &breaks, p.rel_tol, p.max_subdivisions)
}

/// Integrates over consecutive panels `[breaks[i], breaks[i+1]]` sharing a
/// single relative-error budget. Breakpoints must be nondecreasing; empty
/// panels are skipped.
pub fn integrate_panels<F>(
    f: F,
    breaks: &[f64],
    rel_tol: f64,
    max_subdivisions: usize,
) -> Result<QuadOutcome>
where
    F: Fn(f64) -> LogValue,
{
    let mut panels: Vec<PanelState> = breaks
        .windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| PanelState::new(w[0], w[1]))
        .collect();
    if panels.is_empty() {
        return Ok(QuadOutcome {
            value: LogValue::ZERO,
            rel_error: 0.0,
            evaluations: 0,
            subdivisions: 0,
        });
    }

    // coarse pass fixes the scale against which small panels are judged
    let mut evaluations = 0;
    for panel in panels.iter_mut() {
        while panel.level < MIN_LEVEL || panel.evaluations == 0 {
            panel.refine(&f);
        }
    }
    let reference: LogValue = panels.iter().map(|p| p.current.abs()).sum();
    let n_panels = panels.len() as f64;
    let floor = reference.scale_log((rel_tol / (4.0 * n_panels)).ln());

    let mut done = LogSum::new();
    let mut error = LogSum::new();
    let mut subdivisions = 0usize;
    let mut stack: Vec<PanelState> = panels.drain(..).rev().collect();

    while let Some(mut panel) = stack.pop() {
        loop {
            let err = panel.abs_error();
            let own = panel.current.abs().scale_log(rel_tol.ln());
            let settled = panel.level >= MIN_LEVEL
                && (err.cmp_abs(&own).is_le() || err.cmp_abs(&floor).is_le());
            if settled {
                evaluations += panel.evaluations;
                done.push(panel.current);
                error.push(err);
                break;
            }
            if panel.level < MAX_LEVEL {
                panel.refine(&f);
                continue;
            }
            subdivisions += 1;
            evaluations += panel.evaluations;
            if subdivisions > max_subdivisions {
                let mut best = done;
                best.push(panel.current);
                for rest in &stack {
                    best.push(rest.current);
                }
                let value = best.value();
                return Err(Error::Numerical {
                    message: format!(
                        "quadrature did not converge within {max_subdivisions} subdivisions"
                    ),
                    estimate: Some(value.log_mag()),
                    error_estimate: Some(err.log_mag() - value.log_mag()),
                });
            }
            let mid = 0.5 * (panel.a + panel.b);
            stack.push(PanelState::new(mid, panel.b));
            let mut left = PanelState::new(panel.a, mid);
            while left.level < MIN_LEVEL || left.evaluations == 0 {
                left.refine(&f);
            }
            let top = stack.last_mut().expect("just pushed");
            while top.level < MIN_LEVEL || top.evaluations == 0 {
                top.refine(&f);
            }
            panel = left;
        }
    }

    let value = done.value();
    if value.log_mag().is_nan() {
        return Err(Error::numerical("integrand produced a non-finite value"));
    }
    let rel_error = if value.is_zero() {
        0.0
    } else {
        (error.value().log_mag() - value.log_mag()).exp()
    };
    Ok(QuadOutcome {
        value,
        rel_error,
        evaluations,
        subdivisions,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn params() -> EvalParams {
        EvalParams::default()
    }

    #[test]
    fn half_gaussian() {
        let out = quadrature_log(
            |s| LogValue::from_log(-0.5 * s * s),
            0.0,
            40.0,
            None,
            &params(),
        )
        .unwrap();
        let expect = (PI / 2.0).sqrt();
        assert!((out.value.to_f64() / expect - 1.0).abs() < 1e-10);
        assert!((out.value.log_mag() - 0.225_791_352_644_727_4).abs() < 1e-10);
    }

    #[test]
    fn translated_gaussian_with_peak_hint() {
        let f = |s: f64| LogValue::from_log(-0.5 * (s - 1000.0).powi(2));
        let out = quadrature_log(f, 0.0, 2000.0, Some(1000.0), &params()).unwrap();
        assert!((out.value.to_f64() / (2.0 * PI).sqrt() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn identically_zero_integrand() {
        let out = quadrature_log(|_| LogValue::ZERO, 0.0, 1.0, None, &params()).unwrap();
        assert!(out.value.is_zero());
        assert_eq!(out.rel_error, 0.0);
    }

    #[test]
    fn inverse_sqrt_endpoint_singularity() {
        let out = quadrature_log(
            |s| LogValue::from_log(-0.5 * s.ln()),
            0.0,
            4.0,
            None,
            &params(),
        )
        .unwrap();
        assert!((out.value.to_f64() - 4.0).abs() < 1e-10);
    }

    #[test]
    fn deep_underflow_integrand() {
        // integral of exp(-3000 - s) over [0, 50]
        let out = quadrature_log(
            |s| LogValue::from_log(-3000.0 - s),
            0.0,
            50.0,
            None,
            &params(),
        )
        .unwrap();
        let expect = -3000.0 + (-(-50f64).exp()).ln_1p();
        assert!((out.value.log_mag() - expect).abs() < 1e-10);
    }

    #[test]
    fn signed_integrand() {
        // integral of sin over [0, 3pi/2] = 1
        let out = quadrature_log(
            |s| LogValue::from_f64(s.sin()),
            0.0,
            1.5 * PI,
            None,
            &params(),
        )
        .unwrap();
        assert!((out.value.to_f64() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn rejects_bad_intervals() {
        let p = params();
        assert!(quadrature_log(|_| LogValue::ONE, 1.0, 1.0, None, &p).is_err());
        assert!(quadrature_log(|_| LogValue::ONE, 0.0, f64::INFINITY, None, &p).is_err());
    }

    #[test]
    fn subdivision_budget_is_reported() {
        let p = EvalParams {
            max_subdivisions: 1,
            ..EvalParams::default()
        };
        // many narrow unhinted spikes cannot settle with one bisection
        let f = |s: f64| LogValue::from_f64((200.0 * s).sin().powi(2) + 1e-3);
        match quadrature_log(f, 0.0, 50.0, None, &p) {
            Err(Error::Numerical { estimate, .. }) => assert!(estimate.is_some()),
            other => panic!("expected numerical failure, got {other:?}"),
        }
    }
}
