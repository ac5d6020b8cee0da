//! Exact dyadic rationals `num / 2^exp`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::scaled::{ldexp, Scaled};

/// A dyadic rational `numerator / 2^exponent`, kept in canonical form
/// (numerator odd, or numerator zero with exponent zero).
///
/// The exponent is signed so that large floats convert exactly; geometry in
/// `[-1, 1]^N` only ever produces nonnegative exponents.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Dyadic {
    num: BigInt,
    exp: i64,
}

impl Dyadic {
    pub fn new(num: BigInt, exp: i64) -> Self {
        let mut d = Dyadic { num, exp };
        d.normalize();
        d
    }

    pub fn zero() -> Self {
        Dyadic { num: BigInt::zero(), exp: 0 }
    }

    pub fn one() -> Self {
        Dyadic { num: BigInt::one(), exp: 0 }
    }

    pub fn from_int<T: Into<BigInt>>(v: T) -> Self {
        Self::new(v.into(), 0)
    }

    /// `2^k` for any signed `k`.
    pub fn pow2(k: i64) -> Self {
        Dyadic { num: BigInt::one(), exp: -k }
    }

    /// Exact conversion; every finite float is dyadic.
    pub fn from_f64(x: f64) -> Option<Self> {
        if !x.is_finite() {
            return None;
        }
        if x == 0.0 {
            return Some(Self::zero());
        }
        let bits = x.to_bits();
        let sign = if bits >> 63 == 1 { -1i64 } else { 1 };
        let exponent = ((bits >> 52) & 0x7ff) as i64;
        let fraction = bits & ((1u64 << 52) - 1);
        let (mantissa, e) = if exponent == 0 {
            (fraction, -1074)
        } else {
            (fraction | (1u64 << 52), exponent - 1075)
        };
        Some(Self::new(BigInt::from(sign) * BigInt::from(mantissa), -e))
    }

    fn normalize(&mut self) {
        if self.num.is_zero() {
            self.exp = 0;
            return;
        }
        let tz = self.num.trailing_zeros().unwrap_or(0);
        if tz > 0 {
            self.num >>= tz as usize;
            self.exp -= tz as i64;
        }
    }

    pub fn numerator(&self) -> &BigInt {
        &self.num
    }

    /// Denominator exponent: the value is `numerator / 2^exponent`.
    pub fn exponent(&self) -> i64 {
        self.exp
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.num.is_negative()
    }

    pub fn abs(&self) -> Self {
        Dyadic { num: self.num.abs(), exp: self.exp }
    }

    pub fn mul_pow2(&self, k: i64) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        Dyadic { num: self.num.clone(), exp: self.exp - k }
    }

    /// Numerators of `self` and `other` over the common denominator `2^e`.
    fn aligned(&self, other: &Self) -> (BigInt, BigInt, i64) {
        let e = self.exp.max(other.exp);
        let a = &self.num << ((e - self.exp) as usize);
        let b = &other.num << ((e - other.exp) as usize);
        (a, b, e)
    }

    /// Integer `m` with `self = m * 2^-e` when `self` lies on the grid `2^-e`.
    pub fn to_grid(&self, e: i64) -> Option<BigInt> {
        if self.exp > e {
            None
        } else {
            Some(&self.num << ((e - self.exp) as usize))
        }
    }

    /// `floor(self * 2^e)`.
    pub fn floor_on_grid(&self, e: i64) -> BigInt {
        let shift = self.exp - e;
        if shift <= 0 {
            &self.num << ((-shift) as usize)
        } else {
            self.num.div_floor(&(BigInt::one() << shift as usize))
        }
    }

    /// `round(self * 2^e)`, ties away from zero.
    pub fn round_on_grid(&self, e: i64) -> BigInt {
        let shift = self.exp - e;
        if shift <= 0 {
            return &self.num << ((-shift) as usize);
        }
        let half = BigInt::one() << (shift as usize - 1);
        let mag = (self.num.abs() + half) >> shift as usize;
        if self.num.is_negative() {
            -mag
        } else {
            mag
        }
    }

    pub fn to_rational(&self) -> BigRational {
        if self.exp >= 0 {
            BigRational::new(self.num.clone(), BigInt::one() << self.exp as usize)
        } else {
            BigRational::from_integer(&self.num << (-self.exp) as usize)
        }
    }

    pub fn to_scaled(&self) -> Scaled {
        if self.is_zero() {
            return Scaled::zero();
        }
        let bits = self.num.bits() as i64;
        let shift = (bits - 64).max(0);
        let top = (&self.num >> shift as usize).to_f64().unwrap_or(0.0);
        Scaled::from_f64(top).mul_pow2(shift - self.exp)
    }

    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let bits = self.num.bits() as i64;
        let shift = (bits - 64).max(0);
        let top = (&self.num >> shift as usize).to_f64().unwrap_or(0.0);
        ldexp(top, shift - self.exp)
    }

    /// Natural logarithm of a positive value, finite for any size.
    pub fn ln(&self) -> f64 {
        assert!(self.num.sign() == Sign::Plus, "ln of a nonpositive dyadic");
        let bits = self.num.bits() as i64;
        let shift = (bits - 64).max(0);
        let top = (&self.num >> shift as usize).to_f64().unwrap_or(1.0);
        top.ln() + ((shift - self.exp) as f64) * std::f64::consts::LN_2
    }

    pub fn max(self, other: Self) -> Self {
        if self >= other {
            self
        } else {
            other
        }
    }
}

impl Default for Dyadic {
    fn default() -> Self {
        Self::zero()
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let (a, b, _) = self.aligned(other);
        a.cmp(&b)
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Add for &Dyadic {
    type Output = Dyadic;
    fn add(self, rhs: &Dyadic) -> Dyadic {
        let (a, b, e) = self.aligned(rhs);
        Dyadic::new(a + b, e)
    }
}

impl Sub for &Dyadic {
    type Output = Dyadic;
    fn sub(self, rhs: &Dyadic) -> Dyadic {
        let (a, b, e) = self.aligned(rhs);
        Dyadic::new(a - b, e)
    }
}

impl Mul for &Dyadic {
    type Output = Dyadic;
    fn mul(self, rhs: &Dyadic) -> Dyadic {
        Dyadic::new(&self.num * &rhs.num, self.exp + rhs.exp)
    }
}

impl Neg for &Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        Dyadic { num: -&self.num, exp: self.exp }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Dyadic {
            type Output = Dyadic;
            fn $m(self, rhs: Dyadic) -> Dyadic {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        -(&self)
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exp <= 0 {
            write!(f, "{}", &self.num << ((-self.exp) as usize))
        } else {
            write!(f, "{}/2^{}", self.num, self.exp)
        }
    }
}

/// Squared Euclidean distance, exact.
pub fn dist2(x: &[Dyadic], y: &[Dyadic]) -> Dyadic {
    x.iter().zip(y).fold(Dyadic::zero(), |acc, (a, b)| {
        let d = a - b;
        &acc + &(&d * &d)
    })
}

/// Chebyshev distance, exact.
pub fn dist_inf(x: &[Dyadic], y: &[Dyadic]) -> Dyadic {
    x.iter()
        .zip(y)
        .map(|(a, b)| (a - b).abs())
        .fold(Dyadic::zero(), Dyadic::max)
}
