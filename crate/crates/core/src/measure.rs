//! Ray-supported measures described by their counting functions.

use std::f64::consts::{E, PI, TAU};

use crate::error::{Error, Result};

/// How the `a0 * s^alpha` law is read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Mode {
    /// `dmu = a0 s^alpha ds`.
    #[default]
    Density,
    /// `n(s) = a0 s^alpha`.
    Counting,
}

impl std::str::FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "density" => Ok(Mode::Density),
            "counting" => Ok(Mode::Counting),
            other => Err(Error::validation(format!("unknown measure mode `{other}`"))),
        }
    }
}

impl Mode {
    pub fn as_str(&self) -> &'static str {
        match self {
            Mode::Density => "density",
            Mode::Counting => "counting",
        }
    }
}

/// `n(s) = a0 s^alpha` (or its density analogue) for `s > s0`, zero below.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerLaw {
    a0: f64,
    alpha: f64,
    s0: f64,
    mode: Mode,
}

impl PowerLaw {
    pub fn new(a0: f64, alpha: f64, s0: f64, mode: Mode) -> Result<Self> {
        if !(a0.is_finite() && a0 >= 0.0) {
            return Err(Error::validation(format!(
                "a0 must be finite and >= 0, got {a0}"
            )));
        }
        if !(alpha.is_finite() && alpha > -1.0) {
            return Err(Error::validation(format!(
                "alpha must be > -1, got {alpha}"
            )));
        }
        if !(s0.is_finite() && s0 >= 0.0) {
            return Err(Error::validation(format!(
                "s0 must be finite and >= 0, got {s0}"
            )));
        }
        if mode == Mode::Counting && a0 > 0.0 && alpha <= 0.0 {
            return Err(Error::validation(
                "a counting-mode power law needs alpha > 0 to be nondecreasing",
            ));
        }
        Ok(PowerLaw {
            a0,
            alpha,
            s0,
            mode,
        })
    }

    /// Density-mode law `a0 s^alpha ds` with no cutoff.
    pub fn density(a0: f64, alpha: f64) -> Result<Self> {
        Self::new(a0, alpha, 0.0, Mode::Density)
    }

    pub fn a0(&self) -> f64 {
        self.a0
    }
    pub fn alpha(&self) -> f64 {
        self.alpha
    }
    pub fn s0(&self) -> f64 {
        self.s0
    }
    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn with_a0(&self, a0: f64) -> Result<Self> {
        Self::new(a0, self.alpha, self.s0, self.mode)
    }

    /// Exponent of the counting function: `alpha + 1` in density mode.
    pub fn counting_exponent(&self) -> f64 {
        match self.mode {
            Mode::Density => self.alpha + 1.0,
            Mode::Counting => self.alpha,
        }
    }

    /// The same measure written as a density law `c s^e ds` (ignoring the
    /// point mass a counting-mode law carries at `s0 > 0`).
    pub fn as_density_law(&self) -> (f64, f64) {
        match self.mode {
            Mode::Density => (self.a0, self.alpha),
            Mode::Counting => (self.a0 * self.alpha, self.alpha - 1.0),
        }
    }

    fn raw_count(&self, s: f64) -> f64 {
        match self.mode {
            Mode::Counting => self.a0 * s.powf(self.alpha),
            Mode::Density => self.a0 * s.powf(self.alpha + 1.0) / (self.alpha + 1.0),
        }
    }

    pub fn count(&self, s: f64) -> f64 {
        if s <= self.s0 || self.a0 == 0.0 {
            return 0.0;
        }
        match self.mode {
            Mode::Counting => self.raw_count(s),
            Mode::Density => self.raw_count(s) - self.raw_count(self.s0),
        }
    }

    /// Absolutely continuous part `dn/ds` for `s > s0`.
    pub fn density_at(&self, s: f64) -> f64 {
        if s <= self.s0 || self.a0 == 0.0 {
            return 0.0;
        }
        let (c, e) = self.as_density_law();
        c * s.powf(e)
    }

    /// Mass concentrated at `s0` (counting mode with `s0 > 0` only).
    pub fn jump_at_cutoff(&self) -> f64 {
        match self.mode {
            Mode::Counting if self.s0 > 0.0 => self.raw_count(self.s0),
            _ => 0.0,
        }
    }
}

/// Named shapes for the `n1` remainder of a perturbed power law. Both are
/// written in terms of the base counting exponent `beta` and satisfy
/// `s^-beta n1(s) -> 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Remainder {
    /// `n1(s) = s^beta / ln(s + e)`.
    LogDamped,
    /// `n1(s) = s^(beta / 2)`.
    HalfPower,
}

impl std::str::FromStr for Remainder {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "log_damped" => Ok(Remainder::LogDamped),
            "half_power" => Ok(Remainder::HalfPower),
            other => Err(Error::validation(format!(
                "unknown remainder profile `{other}`"
            ))),
        }
    }
}

impl Remainder {
    pub fn as_str(&self) -> &'static str {
        match self {
            Remainder::LogDamped => "log_damped",
            Remainder::HalfPower => "half_power",
        }
    }

    fn value(&self, beta: f64, s: f64) -> f64 {
        match self {
            Remainder::LogDamped => s.powf(beta) / (s + E).ln(),
            Remainder::HalfPower => s.powf(0.5 * beta),
        }
    }

    fn derivative(&self, beta: f64, s: f64) -> f64 {
        match self {
            Remainder::LogDamped => {
                let l = (s + E).ln();
                beta * s.powf(beta - 1.0) / l - s.powf(beta) / ((s + E) * l * l)
            }
            Remainder::HalfPower => 0.5 * beta * s.powf(0.5 * beta - 1.0),
        }
    }
}

/// Power law plus a scaled catalog remainder, `n = n_base + c (n1 - n1(s0))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Perturbed {
    base: PowerLaw,
    remainder: Remainder,
    scale: f64,
}

impl Perturbed {
    pub fn new(base: PowerLaw, remainder: Remainder, scale: f64) -> Result<Self> {
        if !scale.is_finite() {
            return Err(Error::validation("remainder scale must be finite"));
        }
        let p = Perturbed {
            base,
            remainder,
            scale,
        };
        p.check_monotone()?;
        Ok(p)
    }

    pub fn base(&self) -> &PowerLaw {
        &self.base
    }
    pub fn remainder(&self) -> Remainder {
        self.remainder
    }
    pub fn scale(&self) -> f64 {
        self.scale
    }

    fn check_monotone(&self) -> Result<()> {
        let start = self.base.s0.max(1e-6);
        let ratio: f64 = (1e6 / start).max(2.0).powf(1.0 / 400.0);
        let mut prev = self.count(start);
        let mut s = start;
        for _ in 0..400 {
            s *= ratio;
            let n = self.count(s);
            if n < prev - 1e-12 * prev.abs() {
                return Err(Error::validation(format!(
                    "perturbed counting function decreases near s = {s:.6e}"
                )));
            }
            prev = n;
        }
        Ok(())
    }

    fn beta(&self) -> f64 {
        self.base.counting_exponent()
    }

    pub fn remainder_count(&self, s: f64) -> f64 {
        if s <= self.base.s0 || self.scale == 0.0 {
            return 0.0;
        }
        let beta = self.beta();
        self.scale * (self.remainder.value(beta, s) - self.remainder.value(beta, self.base.s0))
    }

    pub fn count(&self, s: f64) -> f64 {
        self.base.count(s) + self.remainder_count(s)
    }

    pub fn density_at(&self, s: f64) -> f64 {
        if s <= self.base.s0 {
            return 0.0;
        }
        let rem = if self.scale == 0.0 {
            0.0
        } else {
            self.scale * self.remainder.derivative(self.beta(), s)
        };
        self.base.density_at(s) + rem
    }
}

/// Finitely many point masses `(s_i, m_i)` with strictly increasing radii.
#[derive(Debug, Clone, PartialEq)]
pub struct Atoms {
    atoms: Vec<(f64, f64)>,
}

impl Atoms {
    pub fn new(atoms: Vec<(f64, f64)>) -> Result<Self> {
        for (i, &(s, m)) in atoms.iter().enumerate() {
            if !(s.is_finite() && s > 0.0) {
                return Err(Error::validation(format!(
                    "atom radius must be > 0, got {s}"
                )));
            }
            if !(m.is_finite() && m > 0.0) {
                return Err(Error::validation(format!("atom mass must be > 0, got {m}")));
            }
            if i > 0 && s <= atoms[i - 1].0 {
                return Err(Error::validation("atom radii must be strictly increasing"));
            }
        }
        Ok(Atoms { atoms })
    }

    pub fn as_slice(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    pub fn count(&self, s: f64) -> f64 {
        self.atoms
            .iter()
            .take_while(|&&(r, _)| r <= s)
            .fold(0.0, |acc, &(_, m)| acc + m)
    }

    /// `n(s-)`.
    pub fn count_left(&self, s: f64) -> f64 {
        self.atoms
            .iter()
            .take_while(|&&(r, _)| r < s)
            .fold(0.0, |acc, &(_, m)| acc + m)
    }
}

/// The mass function `n(s) = mu({|y| <= s})` of a measure on a ray.
#[derive(Debug, Clone, PartialEq)]
pub enum CountingFunction {
    PowerLaw(PowerLaw),
    Perturbed(Perturbed),
    Atoms(Atoms),
}

impl From<PowerLaw> for CountingFunction {
    fn from(p: PowerLaw) -> Self {
        CountingFunction::PowerLaw(p)
    }
}

impl From<Perturbed> for CountingFunction {
    fn from(p: Perturbed) -> Self {
        CountingFunction::Perturbed(p)
    }
}

impl From<Atoms> for CountingFunction {
    fn from(a: Atoms) -> Self {
        CountingFunction::Atoms(a)
    }
}

impl CountingFunction {
    /// `n(s)`.
    pub fn eval(&self, s: f64) -> f64 {
        match self {
            CountingFunction::PowerLaw(p) => p.count(s),
            CountingFunction::Perturbed(p) => p.count(s),
            CountingFunction::Atoms(a) => a.count(s),
        }
    }

    /// `n(s-)`; differs from [`eval`](Self::eval) only at point masses.
    pub fn eval_left(&self, s: f64) -> f64 {
        match self {
            CountingFunction::Atoms(a) => a.count_left(s),
            CountingFunction::PowerLaw(p) if s == p.s0 => 0.0,
            CountingFunction::Perturbed(p) if s == p.base.s0 => 0.0,
            other => other.eval(s),
        }
    }

    /// True when the measure has no mass at all.
    pub fn is_zero(&self) -> bool {
        match self {
            CountingFunction::PowerLaw(p) => p.a0 == 0.0,
            CountingFunction::Perturbed(p) => p.base.a0 == 0.0 && p.scale == 0.0,
            CountingFunction::Atoms(a) => a.atoms.is_empty(),
        }
    }

    /// Radius below which the measure vanishes.
    pub fn support_start(&self) -> f64 {
        match self {
            CountingFunction::PowerLaw(p) => p.s0,
            CountingFunction::Perturbed(p) => p.base.s0,
            CountingFunction::Atoms(a) => a.atoms.first().map_or(0.0, |x| x.0),
        }
    }

    /// Density of the absolutely continuous part (zero for atoms).
    pub fn density_at(&self, s: f64) -> f64 {
        match self {
            CountingFunction::PowerLaw(p) => p.density_at(s),
            CountingFunction::Perturbed(p) => p.density_at(s),
            CountingFunction::Atoms(_) => 0.0,
        }
    }

    /// Point masses `(radius, mass)`, including the jump a counting-mode
    /// law makes at a positive cutoff.
    pub fn point_masses(&self) -> Vec<(f64, f64)> {
        match self {
            CountingFunction::PowerLaw(p) => jump(p),
            CountingFunction::Perturbed(p) => jump(&p.base),
            CountingFunction::Atoms(a) => a.atoms.clone(),
        }
    }

    pub fn has_density(&self) -> bool {
        !matches!(self, CountingFunction::Atoms(_))
    }

    /// Exponent `e < 0` when the density blows up like `s^e` at the origin.
    pub fn origin_exponent(&self) -> Option<f64> {
        let e = match self {
            CountingFunction::PowerLaw(p) if p.s0 == 0.0 => p.counting_exponent() - 1.0,
            CountingFunction::Perturbed(p) if p.base.s0 == 0.0 => {
                let beta = p.base.counting_exponent();
                match (p.scale == 0.0, p.remainder) {
                    (true, _) | (false, Remainder::LogDamped) => beta - 1.0,
                    (false, Remainder::HalfPower) => 0.5 * beta - 1.0,
                }
            }
            _ => return None,
        };
        (e < 0.0).then_some(e)
    }

    /// Exponent governing the growth of the integrand `s^e` near its peak,
    /// used to place quadrature windows.
    pub fn growth_exponent(&self) -> f64 {
        match self {
            CountingFunction::PowerLaw(p) => p.counting_exponent(),
            CountingFunction::Perturbed(p) => p.base.counting_exponent(),
            CountingFunction::Atoms(_) => 0.0,
        }
    }
}

fn jump(p: &PowerLaw) -> Vec<(f64, f64)> {
    let m = p.jump_at_cutoff();
    if m > 0.0 {
        vec![(p.s0, m)]
    } else {
        Vec::new()
    }
}

/// `n(s)` for `s >= 0`.
pub fn eval_counting(n: &CountingFunction, s: f64) -> f64 {
    n.eval(s)
}

/// Direction `theta0` of the supporting ray, normalized into `[0, 2pi)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RayGeometry {
    theta0: f64,
}

/// Maps an angle into `[0, 2pi)`.
pub fn normalize_angle(theta: f64) -> f64 {
    let t = theta.rem_euclid(TAU);
    if t >= TAU {
        0.0
    } else {
        t
    }
}

impl RayGeometry {
    pub fn new(theta0: f64) -> Result<Self> {
        if !theta0.is_finite() {
            return Err(Error::validation("theta0 must be finite"));
        }
        Ok(RayGeometry {
            theta0: normalize_angle(theta0),
        })
    }

    pub fn theta0(&self) -> f64 {
        self.theta0
    }
}

impl Default for RayGeometry {
    fn default() -> Self {
        RayGeometry { theta0: 0.0 }
    }
}

/// Evaluation point `x = (r cos theta, r sin theta)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldPoint {
    r: f64,
    theta: f64,
}

impl FieldPoint {
    pub fn new(r: f64, theta: f64) -> Result<Self> {
        if !(r.is_finite() && r >= 0.0) {
            return Err(Error::validation(format!(
                "radius must be finite and >= 0, got {r}"
            )));
        }
        if !theta.is_finite() {
            return Err(Error::validation("angle must be finite"));
        }
        Ok(FieldPoint {
            r,
            theta: normalize_angle(theta),
        })
    }

    pub fn origin() -> Self {
        FieldPoint { r: 0.0, theta: 0.0 }
    }

    /// Point at angular offset `delta` from the ray.
    pub fn at_offset(r: f64, ray: &RayGeometry, delta: f64) -> Result<Self> {
        Self::new(r, ray.theta0 + delta)
    }

    pub fn r(&self) -> f64 {
        self.r
    }
    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// `theta - theta0`, mapped into `(-pi, pi]`.
    pub fn delta(&self, ray: &RayGeometry) -> f64 {
        let d = normalize_angle(self.theta - ray.theta0);
        if d > PI {
            d - TAU
        } else {
            d
        }
    }
}

/// Outcome of [`tail_condition_check`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TailVerdict {
    Pass,
    /// Growth was detected at `witness`.
    Fail {
        witness: f64,
    },
}

impl TailVerdict {
    pub fn passed(&self) -> bool {
        matches!(self, TailVerdict::Pass)
    }
}

const TAIL_GRID_POINTS: usize = 40;
const TAIL_FLOOR_LN: f64 = -690.775_527_898_213_7; // ln 1e-300

/// Checks `n(s) exp(-s^2 / 4t) -> 0` on the geometric grid
/// `s_max 2^-k, k = 0..=40`, given `ln n(s)`.
///
/// Passes when the three largest radii carry strictly decreasing values and
/// the value at `s_max` is below `1e-300` of the grid maximum.
pub fn tail_condition_check_log<F>(ln_n: F, s_max: f64, t: f64) -> Result<TailVerdict>
where
    F: Fn(f64) -> f64,
{
    if !(t.is_finite() && t > 0.0) {
        return Err(Error::validation(format!("t must be > 0, got {t}")));
    }
    let mut values = Vec::with_capacity(TAIL_GRID_POINTS + 1);
    for k in 0..=TAIL_GRID_POINTS {
        let s = s_max * 0.5f64.powi(k as i32);
        let ln = ln_n(s);
        if ln.is_nan() || ln == f64::INFINITY {
            return Err(Error::Numerical {
                message: format!("counting function is not finite at s = {s}"),
                estimate: None,
                error_estimate: None,
            });
        }
        values.push((s, ln - s * s / (4.0 * t)));
    }
    // ascending radius
    values.reverse();
    let peak = values.iter().map(|v| v.1).fold(f64::NEG_INFINITY, f64::max);
    if peak == f64::NEG_INFINITY {
        return Ok(TailVerdict::Pass);
    }
    let tail = &values[values.len() - 3..];
    for w in tail.windows(2) {
        if !(w[1].1 < w[0].1 || w[1].1 == f64::NEG_INFINITY) {
            return Ok(TailVerdict::Fail { witness: w[1].0 });
        }
    }
    let (s_last, v_last) = values[values.len() - 1];
    if v_last > peak + TAIL_FLOOR_LN {
        return Ok(TailVerdict::Fail { witness: s_last });
    }
    Ok(TailVerdict::Pass)
}

/// Grid radius used by [`tail_condition_check`].
pub fn tail_grid_radius(n: &CountingFunction, t: f64) -> f64 {
    let base = 100.0 * t.sqrt();
    let reach = match n {
        CountingFunction::Atoms(a) => a.atoms.last().map_or(0.0, |x| 10.0 * x.0),
        _ => 10.0 * n.support_start(),
    };
    base.max(reach)
}

/// Verifies the tail-vanishing condition for a counting function at time `t`.
pub fn tail_condition_check(n: &CountingFunction, t: f64) -> Result<TailVerdict> {
    let s_max = tail_grid_radius(n, t);
    tail_condition_check_log(|s| n.eval(s).ln(), s_max, t)
}
