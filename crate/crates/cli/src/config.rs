//! Flat `key = value` run configuration.

use std::fmt::Write as _;
use std::str::FromStr;

use vtheat_core::measure::{Atoms, CountingFunction, Mode, Perturbed, PowerLaw, Remainder};
use vtheat_core::{Error, EvalParams, RayGeometry, RecoverySpec, Result, SweepSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeasureKind {
    PowerLaw,
    Perturbed,
    Atoms,
}

impl MeasureKind {
    fn as_str(&self) -> &'static str {
        match self {
            MeasureKind::PowerLaw => "power_law",
            MeasureKind::Perturbed => "perturbed",
            MeasureKind::Atoms => "atoms",
        }
    }
}

impl FromStr for MeasureKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "power_law" => Ok(MeasureKind::PowerLaw),
            "perturbed" => Ok(MeasureKind::Perturbed),
            "atoms" => Ok(MeasureKind::Atoms),
            other => Err(Error::validation(format!(
                "measure.kind must be power_law, perturbed or atoms, got `{other}`"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Tsv,
}

impl Format {
    pub fn separator(&self) -> char {
        match self {
            Format::Csv => ',',
            Format::Tsv => '\t',
        }
    }
    fn as_str(&self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Tsv => "tsv",
        }
    }
}

impl FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "tsv" => Ok(Format::Tsv),
            other => Err(Error::validation(format!(
                "output.format must be csv or tsv, got `{other}`"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub kind: MeasureKind,
    pub a0: f64,
    pub alpha: f64,
    pub s0: f64,
    pub mode: Mode,
    pub atoms: Vec<(f64, f64)>,
    pub remainder: Remainder,
    pub remainder_scale: f64,
    pub theta0: f64,
    pub kappa: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
    pub sweep_delta: f64,
    pub sweep_t: f64,
    pub sweep_r_start: f64,
    pub sweep_r_factor: f64,
    pub sweep_steps: usize,
    pub recover_radii: Vec<f64>,
    /// `None` means `0.04 * min(radii)^2`.
    pub recover_t_start: Option<f64>,
    pub recover_t_ratio: f64,
    pub recover_t_count: usize,
    pub recover_order: usize,
    pub output_path: Option<String>,
    pub format: Format,
}

impl Default for RunConfig {
    fn default() -> Self {
        let p = EvalParams::default();
        RunConfig {
            kind: MeasureKind::PowerLaw,
            a0: 1.0,
            alpha: 1.0,
            s0: 0.0,
            mode: Mode::Density,
            atoms: Vec::new(),
            remainder: Remainder::LogDamped,
            remainder_scale: 0.0,
            theta0: 0.0,
            kappa: p.kappa,
            rel_tol: p.rel_tol,
            max_subdivisions: p.max_subdivisions,
            sweep_delta: std::f64::consts::PI,
            sweep_t: 1.0,
            sweep_r_start: 10.0,
            sweep_r_factor: 2.0,
            sweep_steps: 8,
            recover_radii: vec![2.0, 4.0, 8.0],
            recover_t_start: None,
            recover_t_ratio: vtheat_core::tauberian::DEFAULT_T_RATIO,
            recover_t_count: vtheat_core::tauberian::DEFAULT_T_COUNT,
            recover_order: vtheat_core::tauberian::DEFAULT_ORDER,
            output_path: None,
            format: Format::Csv,
        }
    }
}

fn bad(key: &str, line: usize, msg: impl std::fmt::Display) -> Error {
    Error::validation(format!("line {line}: {key}: {msg}"))
}

/// Parses a decimal; rejects degree suffixes since angles are radians.
fn number(key: &str, line: usize, v: &str) -> Result<f64> {
    let lower = v.to_ascii_lowercase();
    if lower.ends_with("deg") || lower.ends_with('°') || lower.ends_with("degrees") {
        return Err(bad(
            key,
            line,
            "angles are in radians; degrees are not accepted",
        ));
    }
    let x: f64 = v
        .parse()
        .map_err(|_| bad(key, line, format!("`{v}` is not a number")))?;
    if !x.is_finite() {
        return Err(bad(key, line, "value must be finite"));
    }
    Ok(x)
}

fn count(key: &str, line: usize, v: &str) -> Result<usize> {
    v.parse()
        .map_err(|_| bad(key, line, format!("`{v}` is not a nonnegative integer")))
}

fn strip_brackets(v: &str) -> Option<&str> {
    v.trim().strip_prefix('[')?.strip_suffix(']')
}

/// `[a, b, c]`.
fn number_list(key: &str, line: usize, v: &str) -> Result<Vec<f64>> {
    let inner = strip_brackets(v).ok_or_else(|| bad(key, line, "expected [x, y, ...]"))?;
    if inner.trim().is_empty() {
        return Ok(Vec::new());
    }
    inner
        .split(',')
        .map(|x| number(key, line, x.trim()))
        .collect()
}

/// `[[s, m], [s, m]]`.
fn pair_list(key: &str, line: usize, v: &str) -> Result<Vec<(f64, f64)>> {
    let inner = strip_brackets(v).ok_or_else(|| bad(key, line, "expected [[s, m], ...]"))?;
    let mut out = Vec::new();
    let mut rest = inner.trim();
    while !rest.is_empty() {
        let open = rest
            .strip_prefix('[')
            .ok_or_else(|| bad(key, line, "expected [s, m]"))?;
        let close = open
            .find(']')
            .ok_or_else(|| bad(key, line, "unterminated [s, m]"))?;
        let pair = number_list(key, line, &format!("[{}]", &open[..close]))?;
        if pair.len() != 2 {
            return Err(bad(key, line, "each atom is [s, m]"));
        }
        out.push((pair[0], pair[1]));
        rest = open[close + 1..].trim_start();
        rest = rest.strip_prefix(',').unwrap_or(rest).trim_start();
    }
    Ok(out)
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut c = RunConfig::default();
        let mut seen = std::collections::HashSet::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let (key, value) = body
                .split_once('=')
                .ok_or_else(|| Error::validation(format!("line {line}: expected `key = value`")))?;
            let (key, v) = (key.trim(), value.trim());
            if !seen.insert(key.to_string()) {
                return Err(bad(key, line, "duplicate key"));
            }
            let parse_err = |e: Error| bad(key, line, e);
            match key {
                "measure.kind" => c.kind = v.parse().map_err(parse_err)?,
                "measure.a0" => c.a0 = number(key, line, v)?,
                "measure.alpha" => c.alpha = number(key, line, v)?,
                "measure.s0" => c.s0 = number(key, line, v)?,
                "measure.mode" => c.mode = v.parse().map_err(parse_err)?,
                "measure.atoms" => c.atoms = pair_list(key, line, v)?,
                "measure.remainder" => c.remainder = v.parse().map_err(parse_err)?,
                "measure.remainder_scale" => c.remainder_scale = number(key, line, v)?,
                "geometry.theta0" => c.theta0 = number(key, line, v)?,
                "eval.kappa" => c.kappa = number(key, line, v)?,
                "eval.rel_tol" => c.rel_tol = number(key, line, v)?,
                "eval.max_subdivisions" => c.max_subdivisions = count(key, line, v)?,
                "sweep.delta" => c.sweep_delta = number(key, line, v)?,
                "sweep.t" => c.sweep_t = number(key, line, v)?,
                "sweep.r_start" => c.sweep_r_start = number(key, line, v)?,
                "sweep.r_factor" => c.sweep_r_factor = number(key, line, v)?,
                "sweep.steps" => c.sweep_steps = count(key, line, v)?,
                "recover.radii" => c.recover_radii = number_list(key, line, v)?,
                "recover.t_start" => c.recover_t_start = Some(number(key, line, v)?),
                "recover.t_ratio" => c.recover_t_ratio = number(key, line, v)?,
                "recover.t_count" => c.recover_t_count = count(key, line, v)?,
                "recover.order" => c.recover_order = count(key, line, v)?,
                "output.path" => c.output_path = Some(v.to_string()),
                "output.format" => c.format = v.parse().map_err(parse_err)?,
                other => {
                    return Err(Error::validation(format!(
                        "line {line}: unknown key `{other}`"
                    )))
                }
            }
        }
        c.params()?;
        Ok(c)
    }

    /// Every key, in a form `parse` reads back to an identical config.
    pub fn dump(&self) -> String {
        let mut s = String::new();
        let list = |v: &[f64]| {
            let items: Vec<String> = v.iter().map(|x| format!("{x:?}")).collect();
            format!("[{}]", items.join(", "))
        };
        let atoms: Vec<String> = self
            .atoms
            .iter()
            .map(|(a, b)| format!("[{a:?}, {b:?}]"))
            .collect();
        let _ = writeln!(s, "measure.kind = {}", self.kind.as_str());
        let _ = writeln!(s, "measure.a0 = {:?}", self.a0);
        let _ = writeln!(s, "measure.alpha = {:?}", self.alpha);
        let _ = writeln!(s, "measure.s0 = {:?}", self.s0);
        let _ = writeln!(s, "measure.mode = {}", self.mode.as_str());
        let _ = writeln!(s, "measure.atoms = [{}]", atoms.join(", "));
        let _ = writeln!(s, "measure.remainder = {}", self.remainder.as_str());
        let _ = writeln!(s, "measure.remainder_scale = {:?}", self.remainder_scale);
        let _ = writeln!(s, "geometry.theta0 = {:?}", self.theta0);
        let _ = writeln!(s, "eval.kappa = {:?}", self.kappa);
        let _ = writeln!(s, "eval.rel_tol = {:?}", self.rel_tol);
        let _ = writeln!(s, "eval.max_subdivisions = {}", self.max_subdivisions);
        let _ = writeln!(s, "sweep.delta = {:?}", self.sweep_delta);
        let _ = writeln!(s, "sweep.t = {:?}", self.sweep_t);
        let _ = writeln!(s, "sweep.r_start = {:?}", self.sweep_r_start);
        let _ = writeln!(s, "sweep.r_factor = {:?}", self.sweep_r_factor);
        let _ = writeln!(s, "sweep.steps = {}", self.sweep_steps);
        let _ = writeln!(s, "recover.radii = {}", list(&self.recover_radii));
        match self.recover_t_start {
            Some(t) => {
                let _ = writeln!(s, "recover.t_start = {t:?}");
            }
            None => {
                let _ = writeln!(s, "# recover.t_start defaults to 0.04 * min(radii)^2");
            }
        }
        let _ = writeln!(s, "recover.t_ratio = {:?}", self.recover_t_ratio);
        let _ = writeln!(s, "recover.t_count = {}", self.recover_t_count);
        let _ = writeln!(s, "recover.order = {}", self.recover_order);
        if let Some(p) = &self.output_path {
            let _ = writeln!(s, "output.path = {p}");
        }
        let _ = writeln!(s, "output.format = {}", self.format.as_str());
        s
    }

    pub fn params(&self) -> Result<EvalParams> {
        let p = EvalParams {
            kappa: self.kappa,
            rel_tol: self.rel_tol,
            max_subdivisions: self.max_subdivisions,
            ..EvalParams::default()
        };
        p.validate()?;
        Ok(p)
    }

    pub fn ray(&self) -> Result<RayGeometry> {
        RayGeometry::new(self.theta0)
    }

    pub fn power_law(&self) -> Result<PowerLaw> {
        PowerLaw::new(self.a0, self.alpha, self.s0, self.mode)
    }

    pub fn measure(&self) -> Result<CountingFunction> {
        Ok(match self.kind {
            MeasureKind::PowerLaw => self.power_law()?.into(),
            MeasureKind::Perturbed => {
                Perturbed::new(self.power_law()?, self.remainder, self.remainder_scale)?.into()
            }
            MeasureKind::Atoms => Atoms::new(self.atoms.clone())?.into(),
        })
    }

    pub fn sweep_spec(&self) -> Result<SweepSpec> {
        let s = SweepSpec {
            delta: self.sweep_delta,
            t: self.sweep_t,
            r_start: self.sweep_r_start,
            r_factor: self.sweep_r_factor,
            steps: self.sweep_steps,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn recovery_spec(&self) -> Result<RecoverySpec> {
        let t_start = match self.recover_t_start {
            Some(t) => t,
            None => {
                let r_min = self
                    .recover_radii
                    .iter()
                    .cloned()
                    .fold(f64::INFINITY, f64::min);
                0.04 * r_min * r_min
            }
        };
        RecoverySpec::geometric(
            self.recover_radii.clone(),
            t_start,
            self.recover_t_ratio,
            self.recover_t_count,
            self.recover_order,
        )
    }
}
