//! Positive magnitudes in logarithmic form.
//!
//! Capacity bumps for the log-critical profile need inner radii like
//! `exp(-exp(10^55))`; their logarithm does not fit in an `f64` either, so
//! such values fall back to a doubly-logarithmic coordinate.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

/// Threshold on `ln ln (1/x)` beyond which `ln x` is no longer stored directly.
const LNLN_SWITCH: f64 = 700.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", content = "coord", rename_all = "snake_case")]
pub enum LogScale {
    /// `x = exp(ln)`.
    Ln(f64),
    /// `x = exp(-exp(w))`, only used when `w > 700`.
    NegExpExp(f64),
}

impl LogScale {
    pub fn from_value(x: f64) -> Self {
        assert!(x >= 0.0, "LogScale of a negative value");
        LogScale::Ln(x.ln())
    }

    pub fn from_ln(ln: f64) -> Self {
        LogScale::Ln(ln)
    }

    /// The value `exp(-exp(w))`.
    pub fn from_lnln_inv(w: f64) -> Self {
        if w <= LNLN_SWITCH {
            LogScale::Ln(-w.exp())
        } else {
            LogScale::NegExpExp(w)
        }
    }

    pub fn zero() -> Self {
        LogScale::Ln(f64::NEG_INFINITY)
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, LogScale::Ln(l) if *l == f64::NEG_INFINITY)
    }

    /// `ln x`; `-inf` once it leaves the `f64` range.
    pub fn ln(&self) -> f64 {
        match *self {
            LogScale::Ln(l) => l,
            LogScale::NegExpExp(_) => f64::NEG_INFINITY,
        }
    }

    /// `ln ln (1/x)` for `x < 1`.
    pub fn lnln_inv(&self) -> f64 {
        match *self {
            LogScale::Ln(l) => (-l).ln(),
            LogScale::NegExpExp(w) => w,
        }
    }

    /// `ln(1/x)`, possibly `+inf`.
    pub fn ln_inv(&self) -> f64 {
        match *self {
            LogScale::Ln(l) => -l,
            LogScale::NegExpExp(w) => w.exp(),
        }
    }

    pub fn value(&self) -> f64 {
        self.ln().exp()
    }

    /// `c * x^p` for `p > 0` given `ln c`.
    pub fn pow_scale(&self, p: f64, ln_c: f64) -> Self {
        assert!(p > 0.0);
        match *self {
            LogScale::Ln(l) => {
                let r = p * l + ln_c;
                if r.is_finite() || l == f64::NEG_INFINITY {
                    LogScale::Ln(r)
                } else {
                    // p * l overflowed: move to the doubly-logarithmic form
                    let w = (-l).ln() + p.ln();
                    LogScale::NegExpExp(w)
                }
            }
            LogScale::NegExpExp(w) => {
                // -ln(c x^p) = p e^w - ln c
                let w2 = w + p.ln() + (-ln_c * (-(w + p.ln())).exp()).ln_1p();
                LogScale::from_lnln_inv(w2)
            }
        }
    }

    /// `x + y`.
    pub fn add(&self, other: &Self) -> Self {
        let (hi, lo) = if self >= other { (*self, *other) } else { (*other, *self) };
        match (hi, lo) {
            (LogScale::Ln(a), LogScale::Ln(b)) => {
                if b == f64::NEG_INFINITY {
                    LogScale::Ln(a)
                } else {
                    LogScale::Ln(a + (b - a).exp().ln_1p())
                }
            }
            // the smaller term is below exp(-e^700) relative: absorbed
            (h, _) => h,
        }
    }
}

impl PartialOrd for LogScale {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self, other) {
            (LogScale::Ln(a), LogScale::Ln(b)) => a.partial_cmp(b),
            (LogScale::Ln(a), LogScale::NegExpExp(_)) if *a == f64::NEG_INFINITY => {
                Some(Ordering::Less)
            }
            (LogScale::NegExpExp(_), LogScale::Ln(b)) if *b == f64::NEG_INFINITY => {
                Some(Ordering::Greater)
            }
            (LogScale::Ln(a), LogScale::NegExpExp(w)) => a.partial_cmp(&-w.exp()),
            (LogScale::NegExpExp(w), LogScale::Ln(b)) => (-w.exp()).partial_cmp(b),
            (LogScale::NegExpExp(a), LogScale::NegExpExp(b)) => b.partial_cmp(a),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn doubly_log_roundtrip() {
        let x = LogScale::from_lnln_inv(1e55);
        assert!(matches!(x, LogScale::NegExpExp(_)));
        assert_eq!(x.lnln_inv(), 1e55);
        assert_eq!(x.value(), 0.0);
        let y = LogScale::from_lnln_inv(2.0);
        assert!((y.ln() + 2f64.exp()).abs() < 1e-12);
    }

    #[test]
    fn ordering_across_forms() {
        let tiny = LogScale::from_lnln_inv(1e9);
        let tinier = LogScale::from_lnln_inv(1e10);
        let small = LogScale::from_value(1e-300);
        assert!(tinier < tiny && tiny < small);
    }

    #[test]
    fn scaling_by_power() {
        let pi = std::f64::consts::PI;
        let r = LogScale::from_value(0.05);
        let t = r.pow_scale(2.0, pi.ln());
        assert!((t.value() - pi * 0.0025).abs() < 1e-15);
        let deep = LogScale::from_lnln_inv(1e3).pow_scale(2.0, pi.ln());
        assert!((deep.lnln_inv() - (1e3 + 2f64.ln())).abs() < 1e-9);
        let overflowing = LogScale::Ln(-1e308).pow_scale(4.0, 0.0);
        assert!(matches!(overflowing, LogScale::NegExpExp(_)));
    }

    #[test]
    fn addition() {
        let a = LogScale::from_value(0.25);
        let b = LogScale::from_value(0.5);
        assert!((a.add(&b).value() - 0.75).abs() < 1e-15);
        assert_eq!(a.add(&LogScale::zero()), a);
        let huge_gap = LogScale::from_lnln_inv(1e6);
        assert_eq!(a.add(&huge_gap), a);
    }
}
