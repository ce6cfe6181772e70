//! Subcommand bodies.

use std::path::Path;

use vtheat_core::asymptotics::{constant_audit, convergence_sweep, SweepRow};
use vtheat_core::tauberian::recover as recover_all;
use vtheat_core::{
    classify_regime, fit_power_law, temperature_stieltjes, weber_evaluate, FieldPoint, LogValue,
    RayTemperature, Regime, WeberMethod, WeberQuery,
};

use crate::config::{MeasureKind, RunConfig};
use crate::output::{emit, num, to_file, Table};
use crate::CliError;

/// Below this log magnitude a value is reported as underflowing binary64.
const LN_UNDERFLOW: f64 = -700.0;
/// Weber argument from which sweep rows enter the audit fit.
pub const AUDIT_MIN_WEBER_ARG: f64 = 30.0;

fn linear_or(v: LogValue, word: &str) -> String {
    if v.is_zero() {
        "0".into()
    } else if v.log_mag() < LN_UNDERFLOW || v.log_mag() > -LN_UNDERFLOW {
        word.into()
    } else {
        let x = v.to_f64();
        if (1e-4..1e6).contains(&x.abs()) {
            format!("{x}")
        } else {
            format!("{x:e}")
        }
    }
}

pub fn eval(cfg: &RunConfig, r: f64, theta: f64, t: f64) -> Result<(), CliError> {
    let p = cfg.params()?;
    let ray = cfg.ray()?;
    let measure = cfg.measure()?;
    let x = FieldPoint::new(r, theta)?;
    let u = temperature_stieltjes(&measure, &ray, &x, t, &p)?;
    let word = if u.log_mag() > 0.0 {
        "overflow"
    } else {
        "underflow"
    };
    let text = format!(
        "r = {r}\ntheta = {theta}\nt = {t}\nsign = {}\nln_u = {}\nu = {}\n",
        u.sign(),
        if u.is_zero() {
            "-inf".into()
        } else {
            format!("{}", u.log_mag())
        },
        linear_or(u, word),
    );
    emit(cfg, &text)
}

pub fn weber(nu: f64, z: f64, method: &str) -> Result<(), CliError> {
    let method: WeberMethod = method.parse()?;
    let q = WeberQuery::new(nu, z).with_method(method);
    let rep = weber_evaluate(&q)?;
    let mut text = format!(
        "nu = {nu}\nz = {z}\nmethod = {method:?}\nln_value = {}\nvalue = {}\n",
        rep.value.log_mag(),
        linear_or(rep.value, "overflow"),
    )
    .to_lowercase();
    if let Some(v) = rep.integral {
        text.push_str(&format!("integral = {}\n", linear_or(v, "overflow")));
    }
    if let Some(s) = rep.series {
        text.push_str(&format!(
            "series = {}\nseries_terms = {}\nseries_trunc_rel = {:e}\n",
            linear_or(s.value, "overflow"),
            s.terms_used,
            s.trunc_error_estimate
        ));
    }
    print!("{text}");
    Ok(())
}

fn power_law_only(cfg: &RunConfig) -> Result<(), CliError> {
    if cfg.kind != MeasureKind::PowerLaw {
        return Err(CliError::Validation(
            "sweep and audit need measure.kind = power_law".into(),
        ));
    }
    Ok(())
}

fn sweep_rows(cfg: &RunConfig) -> Result<(Regime, Vec<SweepRow>, bool), CliError> {
    power_law_only(cfg)?;
    let law = cfg.power_law()?;
    let s = convergence_sweep(&law, &cfg.ray()?, &cfg.sweep_spec()?, &cfg.params()?)?;
    Ok((s.regime, s.rows, s.monotone_approach))
}

const SWEEP_HEADER: [&str; 5] = ["r", "ln_u_quad", "ln_u_asym", "ratio", "quad_error_flag"];

fn sweep_table(cfg: &RunConfig, rows: &[SweepRow]) -> Table {
    let mut t = Table::new(cfg, &SWEEP_HEADER);
    for r in rows {
        t.row([
            num(r.r),
            num(r.ln_u_quad),
            num(r.ln_u_asym),
            num(r.ratio),
            u8::from(r.quad_failed).to_string(),
        ]);
    }
    t
}

pub fn sweep(cfg: &RunConfig) -> Result<(), CliError> {
    let (regime, rows, monotone) = sweep_rows(cfg)?;
    emit(cfg, &sweep_table(cfg, &rows).into_string())?;
    let failed = rows.iter().filter(|r| r.quad_failed).count();
    let last = rows.last().map(|r| r.ratio).unwrap_or(f64::NAN);
    eprintln!(
        "sweep: regime={regime} rows={} failed={failed} final_ratio={} monotone_approach={}",
        rows.len(),
        num(last),
        if monotone { "yes" } else { "no" }
    );
    if failed == rows.len() {
        return Err(CliError::Numerical("every sweep row failed".into()));
    }
    Ok(())
}

/// Reads `r,ln_u_quad,ln_u_asym,ratio,quad_error_flag` rows; `#` lines and
/// the header are skipped.
fn read_sweep_csv(cfg: &RunConfig, path: &Path) -> Result<Vec<SweepRow>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Validation(format!("cannot read {}: {e}", path.display())))?;
    let tau = cfg.kappa * cfg.sweep_t;
    let cos = cfg.sweep_delta.cos().abs();
    let sep = cfg.format.separator();
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with("r") {
            continue;
        }
        let bad = || CliError::Validation(format!("{}:{}: malformed row", path.display(), i + 1));
        let cells: Vec<&str> = line.split(sep).map(str::trim).collect();
        if cells.len() != 5 {
            return Err(bad());
        }
        let f = |s: &str| s.parse::<f64>().map_err(|_| bad());
        let r = f(cells[0])?;
        rows.push(SweepRow {
            r,
            ln_u_quad: f(cells[1])?,
            ln_u_asym: f(cells[2])?,
            ratio: f(cells[3])?,
            quad_failed: cells[4] != "0",
            weber_arg: r * cos / (2.0 * tau).sqrt(),
        });
    }
    Ok(rows)
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

pub fn audit(cfg: &RunConfig, input: Option<&Path>) -> Result<(), CliError> {
    power_law_only(cfg)?;
    let law = cfg.power_law()?;
    let p = cfg.params()?;
    let tau = p.tau(cfg.sweep_t)?;
    let delta = cfg.sweep_delta;
    let regime = classify_regime(delta, vtheat_core::asymptotics::DEFAULT_EPS_DELTA);
    let (rows, fit_rows): (Vec<SweepRow>, Vec<SweepRow>) = match input {
        Some(path) => {
            let rows = read_sweep_csv(cfg, path)?;
            (rows.clone(), rows)
        }
        None => {
            let (_, rows, _) = sweep_rows(cfg)?;
            let fit: Vec<SweepRow> = rows
                .iter()
                .filter(|r| regime == Regime::Perpendicular || r.weber_arg >= AUDIT_MIN_WEBER_ARG)
                .cloned()
                .collect();
            (rows, fit)
        }
    };
    let (a0, alpha) = law.as_density_law();
    let rep = constant_audit(&fit_rows, regime, a0, alpha, tau, delta)?;
    let mut t = sweep_table(cfg, &rows);
    let summary = [
        format!("audit regime={} rows_used={}", rep.regime, rep.rows_used),
        format!(
            "fitted c={} p={} q={}",
            num(rep.fitted.c),
            num(rep.fitted.p),
            num(rep.fitted.q)
        ),
        format!(
            "predicted c={} p={} q={}",
            num(rep.predicted.c),
            num(rep.predicted.p),
            num(rep.predicted.q)
        ),
        format!("q {}", verdict(rep.q_ok)),
        format!("p {}", verdict(rep.p_ok)),
        format!("c {}", verdict(rep.c_ok)),
        format!("max_ratio_deviation={}", num(rep.max_ratio_deviation)),
        format!("verdict {}", verdict(rep.converged)),
    ];
    for line in &summary {
        t.comment(line);
    }
    emit(cfg, &t.into_string())?;
    if to_file(cfg) {
        for line in &summary {
            println!("{line}");
        }
    }
    if !rep.converged {
        return Err(CliError::Numerical(
            "fitted coefficients are outside the audit tolerances".into(),
        ));
    }
    Ok(())
}

pub fn recover(cfg: &RunConfig) -> Result<(), CliError> {
    let measure = cfg.measure()?;
    let p = cfg.params()?;
    let spec = cfg.recovery_spec()?;
    let u = RayTemperature::new(measure.clone(), cfg.ray()?, p);
    let rep = recover_all(&u, &spec, &p, Some(&measure))?;

    let mut t = Table::new(cfg, &["r", "t", "disk_mass"]);
    for m in &rep.masses {
        for &(tt, mass) in &m.raw {
            t.row([num(m.r), num(tt), num(mass)]);
        }
    }
    t.section(&["r", "extrapolated_mass", "diagnostic"]);
    for m in &rep.masses {
        t.row([num(m.r), num(m.value), num(m.diagnostic)]);
    }
    let mut summary = Vec::new();
    if let Some(errs) = &rep.relative_errors {
        for (m, e) in rep.masses.iter().zip(errs) {
            let truth = measure.eval(m.r);
            let kind = if truth > 0.0 { "relative" } else { "absolute" };
            summary.push(format!(
                "r={} n(r)={} {kind}_error={}",
                num(m.r),
                num(truth),
                num(*e)
            ));
        }
    }
    let pairs: Vec<(f64, f64)> = rep.masses.iter().map(|m| (m.r, m.value)).collect();
    let fit = if measure.is_zero() {
        summary.push("fit skipped: the measure is zero".into());
        None
    } else {
        match fit_power_law(&pairs) {
            Ok((a0, alpha)) => {
                summary.push(format!("a0_hat={} alpha_hat={}", num(a0), num(alpha)));
                None
            }
            Err(e) => {
                summary.push(format!("fit failed: {e}"));
                Some(e)
            }
        }
    };
    for line in &summary {
        t.comment(line);
    }
    emit(cfg, &t.into_string())?;
    if to_file(cfg) {
        for line in &summary {
            println!("{line}");
        }
    }
    match fit {
        Some(e) => Err(e.into()),
        None => Ok(()),
    }
}
