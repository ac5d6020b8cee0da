//! Measure of the generations and of the residual set.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;

use super::params::{level_factor, ParamSequence};
use crate::numeric::exp_bracket::cmp_exp_neg;

/// `ℋ^N(⋃ Q_n) = 2^N ∏_{i<n} ((1 - 2^{j_i - l_i})^N - (2 * 2^{j_i - l_i})^N)`.
pub fn generation_measure(n: usize, p: &ParamSequence) -> BigRational {
    let mut m = BigRational::from_integer(BigInt::one() << p.dim);
    for i in 0..n {
        m *= level_factor(p.j[i], p.l[i], p.dim);
    }
    m
}

/// The same measure from cardinalities: `card(Q_n) * (2 * 2^{-j_n})^N`.
pub fn generation_measure_by_count(n: usize, p: &ParamSequence) -> BigRational {
    let e = p.dim as i64 * (1 - p.j[n] as i64);
    let cell = if e >= 0 {
        BigRational::from_integer(BigInt::one() << e)
    } else {
        BigRational::new(BigInt::one(), BigInt::one() << -e)
    };
    BigRational::from_integer(p.card(n)) * cell
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasureBound {
    /// `generation_measure(n) / 2^N` for `n = 0..=n_max`, exact.
    #[serde(with = "rationals_as_strings")]
    pub running: Vec<BigRational>,
    /// Whether `running[n] >= e^{-(2 - 2^{1-n})}` holds exactly at every `n`.
    pub running_above_bound: Vec<bool>,
    /// Lower bound for the product of the factors beyond `n_max`.
    pub tail_factor: f64,
    /// Lower bound for `ℋ^N(𝓘)`.
    pub lower: f64,
    /// `2^N e^{-2}`.
    pub floor: f64,
}

mod rationals_as_strings {
    use num_rational::BigRational;
    use serde::{Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[BigRational], s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(|r| r.to_string()).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: serde::Deserializer<'de>>(d: D) -> Result<Vec<BigRational>, D::Error> {
        use serde::de::Error;
        let v: Vec<String> = serde::Deserialize::deserialize(d)?;
        v.iter().map(|s| s.parse().map_err(D::Error::custom)).collect()
    }
}

/// Lower bound for the measure of the residual set. Levels beyond `n_max`
/// are bounded by `e^{-Σ_{i >= n_max} 2^{-i}} = e^{-2^{1-n_max}}`, which the
/// per-level factor bound guarantees for any continuation of the sequence.
pub fn inner_set_lower_bound(p: &ParamSequence) -> MeasureBound {
    let n_max = p.n_max();
    let scale = BigRational::from_integer(BigInt::one() << p.dim);
    let running: Vec<BigRational> = (0..=n_max).map(|n| generation_measure(n, p) / &scale).collect();
    let running_above_bound = running
        .iter()
        .enumerate()
        .map(|(n, r)| {
            let x = BigRational::from_integer(2.into())
                - BigRational::new(BigInt::one(), BigInt::one() << n) * BigRational::from_integer(2.into());
            cmp_exp_neg(r, &x) != Ordering::Less
        })
        .collect();
    let tail_factor = (-(2f64.powi(1 - n_max as i32))).exp() * (1.0 - 1e-15);
    let prefix = running.last().and_then(|r| r.to_f64()).unwrap_or(0.0) * (1.0 - 1e-15);
    let two_n = 2f64.powi(p.dim as i32);
    MeasureBound {
        running,
        running_above_bound,
        tail_factor,
        lower: two_n * prefix * tail_factor,
        floor: two_n * (-2f64).exp(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strict_generation_one() {
        let p = ParamSequence::default_strict(2);
        assert_eq!(generation_measure(0, &p), BigRational::from_integer(4.into()));
        let m1 = generation_measure(1, &p);
        assert_eq!(m1, BigRational::new(221.into(), 64.into()));
        assert_eq!(generation_measure_by_count(1, &p), m1);
        assert_eq!(generation_measure_by_count(2, &p), generation_measure(2, &p));
    }

    #[test]
    fn strict_lower_bound() {
        let p = ParamSequence::default_strict(2);
        let b = inner_set_lower_bound(&p);
        assert!(b.running_above_bound.iter().all(|&x| x));
        assert!(b.lower > b.floor);
    }
}
