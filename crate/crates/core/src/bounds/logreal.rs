use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use serde::Serialize;

/// A real number stored as a sign and the natural log of its magnitude, so
/// that quantities like `|Z|^(|Z|+4)` stay representable.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LogReal {
    /// -1, 0 or 1.
    sign: i8,
    /// `ln |x|`; negative infinity for zero.
    ln: f64,
}

impl LogReal {
    pub const ZERO: LogReal = LogReal { sign: 0, ln: f64::NEG_INFINITY };
    pub const ONE: LogReal = LogReal { sign: 1, ln: 0.0 };

    pub fn from_f64(x: f64) -> Self {
        if x == 0.0 {
            LogReal::ZERO
        } else {
            LogReal { sign: if x > 0.0 { 1 } else { -1 }, ln: x.abs().ln() }
        }
    }

    /// The positive number `exp(ln)`.
    pub fn from_ln(ln: f64) -> Self {
        if ln == f64::NEG_INFINITY {
            LogReal::ZERO
        } else {
            LogReal { sign: 1, ln }
        }
    }

    pub fn from_log10(log10: f64) -> Self {
        LogReal::from_ln(log10 * std::f64::consts::LN_10)
    }

    pub fn sign(&self) -> i8 {
        self.sign
    }

    pub fn is_zero(&self) -> bool {
        self.sign == 0
    }

    /// `ln |x|`.
    pub fn ln_abs(&self) -> f64 {
        self.ln
    }

    pub fn log10_abs(&self) -> f64 {
        self.ln / std::f64::consts::LN_10
    }

    /// Nearest double; saturates to infinity or zero.
    pub fn to_f64(&self) -> f64 {
        self.sign as f64 * self.ln.exp()
    }

    /// Whether `to_f64` is finite and not flushed to zero.
    pub fn fits_f64(&self) -> bool {
        self.is_zero() || (self.ln < 709.0 && self.ln > -708.0)
    }

    pub fn powf(self, k: f64) -> Self {
        assert!(self.sign >= 0, "power of a negative LogReal");
        if self.is_zero() {
            return if k == 0.0 { LogReal::ONE } else { LogReal::ZERO };
        }
        LogReal::from_ln(self.ln * k)
    }

    pub fn abs(self) -> Self {
        LogReal { sign: self.sign.abs(), ln: self.ln }
    }

    pub fn max(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    pub fn min(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }

    /// `log10 |x|` plus, when it fits, the decimal value.
    pub fn render(&self) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let sign = if self.sign < 0 { "-" } else { "" };
        if self.fits_f64() {
            format!("{:.6e} (log10 {sign}|x| = {:.4})", self.to_f64(), self.log10_abs())
        } else {
            format!("{sign}10^{:.4}", self.log10_abs())
        }
    }
}

impl fmt::Display for LogReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl PartialOrd for LogReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match self.sign.cmp(&other.sign) {
            Ordering::Equal => match self.sign {
                0 => Some(Ordering::Equal),
                1 => self.ln.partial_cmp(&other.ln),
                _ => other.ln.partial_cmp(&self.ln),
            },
            o => Some(o),
        }
    }
}

impl Neg for LogReal {
    type Output = LogReal;
    fn neg(self) -> LogReal {
        LogReal { sign: -self.sign, ln: self.ln }
    }
}

impl Mul for LogReal {
    type Output = LogReal;
    fn mul(self, rhs: LogReal) -> LogReal {
        if self.is_zero() || rhs.is_zero() {
            return LogReal::ZERO;
        }
        LogReal { sign: self.sign * rhs.sign, ln: self.ln + rhs.ln }
    }
}

impl Div for LogReal {
    type Output = LogReal;
    fn div(self, rhs: LogReal) -> LogReal {
        assert!(!rhs.is_zero(), "LogReal division by zero");
        if self.is_zero() {
            return LogReal::ZERO;
        }
        LogReal { sign: self.sign * rhs.sign, ln: self.ln - rhs.ln }
    }
}

impl Add for LogReal {
    type Output = LogReal;
    fn add(self, rhs: LogReal) -> LogReal {
        if self.is_zero() {
            return rhs;
        }
        if rhs.is_zero() {
            return self;
        }
        let (big, small) = if self.ln >= rhs.ln { (self, rhs) } else { (rhs, self) };
        let d = small.ln - big.ln;
        if big.sign == small.sign {
            LogReal { sign: big.sign, ln: big.ln + d.exp().ln_1p() }
        } else if d == 0.0 {
            LogReal::ZERO
        } else {
            LogReal { sign: big.sign, ln: big.ln + (-d.exp()).ln_1p() }
        }
    }
}

impl Sub for LogReal {
    type Output = LogReal;
    fn sub(self, rhs: LogReal) -> LogReal {
        self + (-rhs)
    }
}

impl std::iter::Sum for LogReal {
    fn sum<I: Iterator<Item = LogReal>>(iter: I) -> LogReal {
        iter.fold(LogReal::ZERO, |a, b| a + b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn arithmetic() {
        let a = LogReal::from_f64(3.0);
        let b = LogReal::from_f64(-5.0);
        assert!(((a + b).to_f64() + 2.0).abs() < 1e-14);
        assert!(((a - b).to_f64() - 8.0).abs() < 1e-14);
        assert!(((a * b).to_f64() + 15.0).abs() < 1e-13);
        assert!(((b / a).to_f64() + 5.0 / 3.0).abs() < 1e-14);
        assert!((a - a).is_zero());
        assert!(b < a && LogReal::ZERO < a && b < LogReal::ZERO);
        assert_eq!(LogReal::from_f64(2.0).powf(10.0).to_f64().round(), 1024.0);
    }

    #[test]
    fn huge_values_stay_finite() {
        let z = LogReal::from_f64(3025.0);
        let big = z.powf(3029.0);
        assert!(!big.fits_f64());
        assert!((big.log10_abs() - 3029.0 * 3025f64.log10()).abs() < 1e-9);
        let r = big / big;
        assert!((r.to_f64() - 1.0).abs() < 1e-12);
        assert!(big.render().starts_with("10^"));
    }

    proptest! {
        #[test]
        fn round_trip(m in 1.0f64..10.0, e in -300i32..300, neg: bool) {
            let x = if neg { -m } else { m } * 10f64.powi(e);
            let y = LogReal::from_f64(x).to_f64();
            prop_assert!(((y - x) / x).abs() < 1e-12);
        }

        #[test]
        fn addition_matches_f64(a in -1e6f64..1e6, b in -1e6f64..1e6) {
            let s = (LogReal::from_f64(a) + LogReal::from_f64(b)).to_f64();
            prop_assert!((s - (a + b)).abs() <= 1e-9 * (a.abs() + b.abs()).max(1.0));
        }
    }
}
