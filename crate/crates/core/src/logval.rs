//! Signed log-domain numbers.
//!
//! The Gaussian factor `exp(-r^2 / 4t)` leaves the binary64 range once the
//! exponent drops below about -745, long before the asymptotic regimes of
//! interest are reached. Every temperature is therefore carried as a sign and
//! the natural log of its magnitude.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// `sign * exp(log_mag)`; zero has `sign == 0` and `log_mag == -inf`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogValue {
    sign: i8,
    log_mag: f64,
}

impl LogValue {
    pub const ZERO: LogValue = LogValue {
        sign: 0,
        log_mag: f64::NEG_INFINITY,
    };
    pub const ONE: LogValue = LogValue {
        sign: 1,
        log_mag: 0.0,
    };

    /// Builds a value from its parts. A non-finite `log_mag` of `-inf`
    /// collapses to zero; `+inf` and NaN are rejected with `None`.
    pub fn new(sign: i8, log_mag: f64) -> Option<Self> {
        if sign == 0 || log_mag == f64::NEG_INFINITY {
            return Some(Self::ZERO);
        }
        if !log_mag.is_finite() {
            return None;
        }
        Some(LogValue {
            sign: sign.signum(),
            log_mag,
        })
    }

    /// Positive value `exp(log_mag)`.
    #[inline]
    pub fn from_log(log_mag: f64) -> Self {
        if log_mag == f64::NEG_INFINITY {
            Self::ZERO
        } else {
            LogValue { sign: 1, log_mag }
        }
    }

    #[inline]
    pub fn from_f64(x: f64) -> Self {
        if x == 0.0 {
            Self::ZERO
        } else {
            LogValue {
                sign: if x > 0.0 { 1 } else { -1 },
                log_mag: x.abs().ln(),
            }
        }
    }

    #[inline]
    pub fn sign(&self) -> i8 {
        self.sign
    }

    /// Natural log of `|self|`; `-inf` for zero.
    #[inline]
    pub fn log_mag(&self) -> f64 {
        self.log_mag
    }

    #[inline]
    pub fn is_zero(&self) -> bool {
        self.sign == 0
    }

    pub fn is_finite(&self) -> bool {
        self.sign == 0 || self.log_mag.is_finite()
    }

    /// Linear value; underflows to `0.0` or overflows to `inf` outside range.
    #[inline]
    pub fn to_f64(&self) -> f64 {
        match self.sign {
            0 => 0.0,
            s => f64::from(s) * self.log_mag.exp(),
        }
    }

    pub fn abs(self) -> Self {
        if self.sign == 0 {
            self
        } else {
            LogValue {
                sign: 1,
                log_mag: self.log_mag,
            }
        }
    }

    /// Multiplies by `exp(log_factor)`.
    #[inline]
    pub fn scale_log(self, log_factor: f64) -> Self {
        if self.sign == 0 {
            self
        } else {
            LogValue {
                sign: self.sign,
                log_mag: self.log_mag + log_factor,
            }
        }
    }

    /// `self / other - 1` evaluated without leaving the log domain until the
    /// result is O(1). Zero divided by zero is reported as 0.
    pub fn rel_diff(self, other: LogValue) -> f64 {
        match (self.sign, other.sign) {
            (0, 0) => 0.0,
            (0, _) | (_, 0) => f64::INFINITY,
            (a, b) if a != b => f64::INFINITY,
            _ => (self.log_mag - other.log_mag).exp_m1(),
        }
    }

    /// Compares magnitudes.
    pub fn cmp_abs(&self, other: &LogValue) -> Ordering {
        self.log_mag
            .partial_cmp(&other.log_mag)
            .unwrap_or(Ordering::Equal)
    }
}

impl Default for LogValue {
    fn default() -> Self {
        Self::ZERO
    }
}

impl fmt::Display for LogValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.sign {
            0 => write!(f, "0"),
            1 => write!(f, "exp({})", self.log_mag),
            _ => write!(f, "-exp({})", self.log_mag),
        }
    }
}

impl Mul for LogValue {
    type Output = LogValue;
    #[inline]
    fn mul(self, rhs: LogValue) -> LogValue {
        if self.sign == 0 || rhs.sign == 0 {
            return LogValue::ZERO;
        }
        LogValue {
            sign: self.sign * rhs.sign,
            log_mag: self.log_mag + rhs.log_mag,
        }
    }
}

impl Div for LogValue {
    type Output = LogValue;
    /// Division by zero yields a NaN magnitude; callers check divisors.
    #[inline]
    fn div(self, rhs: LogValue) -> LogValue {
        if self.sign == 0 {
            return LogValue::ZERO;
        }
        if rhs.sign == 0 {
            return LogValue {
                sign: self.sign,
                log_mag: f64::NAN,
            };
        }
        LogValue {
            sign: self.sign * rhs.sign,
            log_mag: self.log_mag - rhs.log_mag,
        }
    }
}

impl Neg for LogValue {
    type Output = LogValue;
    fn neg(self) -> LogValue {
        LogValue {
            sign: -self.sign,
            log_mag: self.log_mag,
        }
    }
}

impl Add for LogValue {
    type Output = LogValue;
    fn add(self, rhs: LogValue) -> LogValue {
        if self.sign == 0 {
            return rhs;
        }
        if rhs.sign == 0 {
            return self;
        }
        let (big, small) = if self.log_mag >= rhs.log_mag {
            (self, rhs)
        } else {
            (rhs, self)
        };
        let d = small.log_mag - big.log_mag;
        if big.sign == small.sign {
            LogValue {
                sign: big.sign,
                log_mag: big.log_mag + d.exp().ln_1p(),
            }
        } else if d == 0.0 {
            LogValue::ZERO
        } else {
            LogValue {
                sign: big.sign,
                log_mag: big.log_mag + (-d.exp()).ln_1p(),
            }
        }
    }
}

impl Sub for LogValue {
    type Output = LogValue;
    fn sub(self, rhs: LogValue) -> LogValue {
        self + (-rhs)
    }
}

impl std::iter::Sum for LogValue {
    fn sum<I: Iterator<Item = LogValue>>(iter: I) -> LogValue {
        let mut acc = LogSum::new();
        for v in iter {
            acc.push(v);
        }
        acc.value()
    }
}

/// `ln(exp(a) + exp(b))`.
#[inline]
pub fn log_add_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// Streaming log-sum-exp over one sign.
#[derive(Debug, Clone, Copy)]
struct Stream {
    max: f64,
    scaled: f64,
}

impl Stream {
    const EMPTY: Stream = Stream {
        max: f64::NEG_INFINITY,
        scaled: 0.0,
    };

    #[inline]
    fn push(&mut self, x: f64) {
        if x == f64::NEG_INFINITY {
            return;
        }
        if x <= self.max {
            self.scaled += (x - self.max).exp();
        } else {
            self.scaled = self.scaled * (self.max - x).exp() + 1.0;
            self.max = x;
        }
    }

    #[inline]
    fn log(&self) -> f64 {
        if self.max == f64::NEG_INFINITY {
            f64::NEG_INFINITY
        } else {
            self.max + self.scaled.ln()
        }
    }
}

/// Accumulates signed log-domain terms; positive and negative contributions
/// are kept in separate streams and combined only once, in [`LogSum::value`].
#[derive(Debug, Clone, Copy)]
pub struct LogSum {
    pos: Stream,
    neg: Stream,
}

impl Default for LogSum {
    fn default() -> Self {
        Self::new()
    }
}

impl LogSum {
    pub fn new() -> Self {
        LogSum {
            pos: Stream::EMPTY,
            neg: Stream::EMPTY,
        }
    }

    #[inline]
    pub fn push(&mut self, v: LogValue) {
        match v.sign {
            1 => self.pos.push(v.log_mag),
            -1 => self.neg.push(v.log_mag),
            _ => {}
        }
    }

    pub fn merge(&mut self, other: &LogSum) {
        self.push(LogValue::from_log(other.pos.log()));
        self.push(-LogValue::from_log(other.neg.log()));
    }

    pub fn positive_part(&self) -> LogValue {
        LogValue::from_log(self.pos.log())
    }

    pub fn negative_part(&self) -> LogValue {
        LogValue::from_log(self.neg.log())
    }

    pub fn value(&self) -> LogValue {
        self.positive_part() - self.negative_part()
    }
}
