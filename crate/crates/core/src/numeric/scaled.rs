//! Nonnegative numbers in mantissa / base-2 exponent form, for bounds that
//! leave the `f64` exponent range (ratios like `2^{273}`, heights `2^{-546}`).

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

/// `x * 2^e` without intermediate overflow or premature underflow.
pub fn ldexp(x: f64, e: i64) -> f64 {
    let mut x = x;
    let mut e = e;
    while e > 1000 {
        x *= 2f64.powi(1000);
        e -= 1000;
        if x.is_infinite() {
            return x;
        }
    }
    while e < -1000 {
        x *= 2f64.powi(-1000);
        e += 1000;
        if x == 0.0 {
            return x;
        }
    }
    x * 2f64.powi(e as i32)
}

/// `mantissa * 2^exponent` with `mantissa` in `[1, 2)`, or exactly zero.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scaled {
    pub mantissa: f64,
    pub exponent: i64,
}

impl Scaled {
    pub fn zero() -> Self {
        Scaled { mantissa: 0.0, exponent: 0 }
    }

    pub fn pow2(e: i64) -> Self {
        Scaled { mantissa: 1.0, exponent: e }
    }

    pub fn from_f64(x: f64) -> Self {
        assert!(x >= 0.0 && x.is_finite(), "Scaled holds finite nonnegative values");
        if x == 0.0 {
            return Self::zero();
        }
        let mut e = x.log2().floor() as i64;
        let mut m = ldexp(x, -e);
        // log2 rounding can land one off
        while m >= 2.0 {
            m /= 2.0;
            e += 1;
        }
        while m < 1.0 {
            m *= 2.0;
            e -= 1;
        }
        Scaled { mantissa: m, exponent: e }
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa == 0.0
    }

    pub fn mul_pow2(self, k: i64) -> Self {
        if self.is_zero() {
            self
        } else {
            Scaled { mantissa: self.mantissa, exponent: self.exponent + k }
        }
    }

    pub fn mul(self, other: Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        Self::from_f64(self.mantissa * other.mantissa).mul_pow2(self.exponent + other.exponent)
    }

    pub fn mul_f64(self, x: f64) -> Self {
        self.mul(Self::from_f64(x))
    }

    pub fn div(self, other: Self) -> Self {
        assert!(!other.is_zero(), "division by zero");
        if self.is_zero() {
            return self;
        }
        Self::from_f64(self.mantissa / other.mantissa).mul_pow2(self.exponent - other.exponent)
    }

    pub fn sqrt(self) -> Self {
        if self.is_zero() {
            return self;
        }
        let (m, e) = if self.exponent.rem_euclid(2) == 0 {
            (self.mantissa, self.exponent)
        } else {
            (self.mantissa * 2.0, self.exponent - 1)
        };
        Self::from_f64(m.sqrt()).mul_pow2(e / 2)
    }

    /// Widen by a relative factor, for outward rounding of bounds.
    pub fn inflate(self, rel: f64) -> Self {
        self.mul_f64(1.0 + rel)
    }

    pub fn deflate(self, rel: f64) -> Self {
        self.mul_f64(1.0 - rel)
    }

    pub fn log2(&self) -> f64 {
        if self.is_zero() {
            f64::NEG_INFINITY
        } else {
            self.mantissa.log2() + self.exponent as f64
        }
    }

    /// Nearest `f64`; may overflow to infinity or underflow to zero.
    pub fn to_f64(&self) -> f64 {
        ldexp(self.mantissa, self.exponent)
    }

    /// Whether printing as a plain decimal would lose the exponent.
    pub fn needs_exponent_form(&self) -> bool {
        !self.is_zero() && self.log2().abs() > 900.0
    }

    /// Difference `self - other`, clamped at zero.
    pub fn saturating_sub(self, other: Self) -> Self {
        if other >= self {
            return Self::zero();
        }
        if other.is_zero() {
            return self;
        }
        let shift = other.exponent - self.exponent;
        let diff = self.mantissa - ldexp(other.mantissa, shift);
        Self::from_f64(diff.max(0.0)).mul_pow2(self.exponent)
    }
}

impl PartialOrd for Scaled {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self.is_zero(), other.is_zero()) {
            (true, true) => Some(Ordering::Equal),
            (true, false) => Some(Ordering::Less),
            (false, true) => Some(Ordering::Greater),
            _ => match self.exponent.cmp(&other.exponent) {
                Ordering::Equal => self.mantissa.partial_cmp(&other.mantissa),
                o => Some(o),
            },
        }
    }
}

impl fmt::Display for Scaled {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.needs_exponent_form() {
            write!(f, "{}*2^{}", self.mantissa, self.exponent)
        } else {
            write!(f, "{:e}", self.to_f64())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalizes_mantissa() {
        let s = Scaled::from_f64(12.0);
        assert_eq!(s.mantissa, 1.5);
        assert_eq!(s.exponent, 3);
        assert_eq!(s.to_f64(), 12.0);
    }

    #[test]
    fn out_of_range_arithmetic() {
        let big = Scaled::pow2(2000);
        let tiny = Scaled::pow2(-2000);
        assert_eq!(big.mul(tiny).to_f64(), 1.0);
        assert_eq!(big.div(Scaled::pow2(1999)).to_f64(), 2.0);
        assert!(big.needs_exponent_form());
        assert_eq!(Scaled::pow2(-1001).sqrt().log2(), -500.5);
    }

    #[test]
    fn ordering_and_subtraction() {
        assert!(Scaled::pow2(-60) > Scaled::pow2(-546));
        let d = Scaled::pow2(-60).saturating_sub(Scaled::pow2(-61));
        assert_eq!(d, Scaled::pow2(-61));
        assert!(Scaled::pow2(3).saturating_sub(Scaled::pow2(4)).is_zero());
    }

    #[test]
    fn ldexp_extremes() {
        assert_eq!(ldexp(1.0, -1074), f64::from_bits(1));
        assert_eq!(ldexp(1.0, 1023), 2f64.powi(1023));
        assert!(ldexp(1.0, 5000).is_infinite());
    }
}
