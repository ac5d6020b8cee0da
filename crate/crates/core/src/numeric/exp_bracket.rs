//! Rational enclosures of `exp(-x)` for rational `x >= 0`, so inequalities
//! against `e^{-2^{-n}}` are decided without floating point.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// `(lo, hi)` with `lo < exp(-x) < hi` (or equal when `x = 0`), width shrinking
/// with `terms`.
pub fn exp_neg_bracket(x: &BigRational, terms: usize) -> (BigRational, BigRational) {
    assert!(!x.is_negative(), "exp_neg_bracket needs x >= 0");
    if x.is_zero() {
        return (BigRational::one(), BigRational::one());
    }
    // halve until x <= 1, then square the enclosure back up
    let mut squarings = 0u32;
    let mut y = x.clone();
    let one = BigRational::one();
    while y > one {
        y /= BigRational::from_integer(BigInt::from(2));
        squarings += 1;
    }
    // alternating series with decreasing terms: consecutive partial sums bracket
    let mut term = BigRational::one();
    let mut sum = BigRational::one();
    let mut prev = sum.clone();
    for k in 1..=terms.max(2) {
        term = -term * &y / BigRational::from_integer(BigInt::from(k));
        prev = sum.clone();
        sum += &term;
    }
    let (mut lo, mut hi) = if sum < prev { (sum, prev) } else { (prev, sum) };
    if lo.is_negative() {
        lo = BigRational::zero();
    }
    for _ in 0..squarings {
        lo = &lo * &lo;
        hi = &hi * &hi;
    }
    (lo, hi)
}

/// Exact comparison of `v` with `exp(-x)`; `x > 0` rational makes equality
/// impossible for rational `v`, so this always terminates.
pub fn cmp_exp_neg(v: &BigRational, x: &BigRational) -> Ordering {
    if x.is_zero() {
        return v.cmp(&BigRational::one());
    }
    let mut terms = 8;
    loop {
        let (lo, hi) = exp_neg_bracket(x, terms);
        if v < &lo {
            return Ordering::Less;
        }
        if v > &hi {
            return Ordering::Greater;
        }
        terms *= 2;
        assert!(terms < 1 << 16, "exp bracket failed to separate");
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn brackets_contain_float_value() {
        for (n, d) in [(1, 1), (1, 2), (1, 8), (2, 1), (7, 3)] {
            let x = rat(n, d);
            let (lo, hi) = exp_neg_bracket(&x, 20);
            let e = (-(n as f64) / d as f64).exp();
            let lo_f: f64 = num_traits::ToPrimitive::to_f64(&lo).unwrap();
            let hi_f: f64 = num_traits::ToPrimitive::to_f64(&hi).unwrap();
            assert!(lo_f <= e * (1.0 + 1e-15) && e <= hi_f * (1.0 + 1e-15), "{n}/{d}");
            assert!(hi_f - lo_f < 1e-12);
        }
    }

    #[test]
    fn decides_close_comparisons() {
        // e^{-1} = 0.36787944117...
        assert_eq!(cmp_exp_neg(&rat(36787944, 100000000), &rat(1, 1)), Ordering::Less);
        assert_eq!(cmp_exp_neg(&rat(36787945, 100000000), &rat(1, 1)), Ordering::Greater);
        assert_eq!(cmp_exp_neg(&rat(5, 16), &rat(1, 1)), Ordering::Less);
        assert_eq!(cmp_exp_neg(&rat(221, 256), &rat(1, 1)), Ordering::Greater);
    }
}
