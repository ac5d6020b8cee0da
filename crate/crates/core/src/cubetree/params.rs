//! Parameter sequences `j_n, k_n, l_n, a_n, ε_n` and their validation.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;

use super::CubeError;
use crate::numeric::exp_bracket::cmp_exp_neg;
use crate::numeric::Dyadic;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Strict,
    Relaxed,
}

/// Parameters of the construction. Level `n` cubes have half-side
/// `2^{-j_n}` for `n <= n_max`; levels `n < n_max` carry inner cubes of
/// half-side `2^{-l_n}` and bumps of height `2^{-k_n}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamSequence {
    pub dim: u32,
    pub mode: Mode,
    pub j: Vec<u64>,
    pub k: Vec<u64>,
    pub l: Vec<u64>,
    /// `a_n = 2^{-m_n}` from [`choose_a`].
    pub a_exp: Vec<u64>,
    /// `ε_n = 2^{-n} / card(Q_n)`, zero when the generation is empty.
    pub eps: Vec<BigRational>,
    /// Children per selected cube at each level `n < n_max`.
    pub children: Vec<BigInt>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub rule: String,
    pub level: usize,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Validation {
    pub violations: Vec<Violation>,
    /// Constraints not checked in relaxed mode.
    pub skipped: Vec<String>,
}

impl Validation {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Default strict `j` for `n_max = 3`.
pub const DEFAULT_J: [u64; 4] = [0, 9, 90, 819];

pub fn strict_k(j: u64) -> u64 {
    2 * j / 3
}

pub fn strict_l(j_n: u64, j_next: u64) -> u64 {
    j_next / 3 + 2 * j_n / 3 + 1
}

/// Smallest strict `j` of length `n_max + 1`: each term the least multiple
/// of 3 that is at least `9 (j_n + 1)`.
pub fn auto_j(n_max: usize) -> Vec<u64> {
    let mut j = vec![0u64];
    for _ in 0..n_max {
        let lo = 9 * (j.last().unwrap() + 1);
        j.push(lo.div_ceil(3) * 3);
    }
    j
}

fn pow2(e: u64) -> BigInt {
    BigInt::one() << e
}

fn lemma_lhs(m: u64, dim: u32) -> BigRational {
    // (1 - 2^{-m})^N - (2^{1-m})^N
    let a = BigRational::new(BigInt::one(), pow2(m));
    let one = BigRational::one();
    let two_a = &a * BigRational::from_integer(BigInt::from(2));
    num_traits::pow(&one - &a, dim as usize) - num_traits::pow(two_a, dim as usize)
}

fn lemma_holds(value: &BigRational, n: usize) -> bool {
    let x = BigRational::new(BigInt::one(), pow2(n as u64));
    cmp_exp_neg(value, &x) == Ordering::Greater
}

/// Largest `a_n = 2^{-m}` with `(1 - a_n)^N - (2 a_n)^N > e^{-2^{-n}}`;
/// returns `m`.
pub fn choose_a_exp(n: usize, dim: u32) -> u64 {
    (1u64..)
        .find(|&m| lemma_holds(&lemma_lhs(m, dim), n))
        .expect("the left side tends to 1")
}

pub fn choose_a(n: usize, dim: u32) -> Dyadic {
    Dyadic::pow2(-(choose_a_exp(n, dim) as i64))
}

/// Per-level measure factor `(1 - 2^{j_n - l_n})^N - (2 * 2^{j_n - l_n})^N`.
pub fn level_factor(j_n: u64, l_n: u64, dim: u32) -> BigRational {
    if l_n <= j_n {
        return BigRational::zero();
    }
    let v = lemma_lhs(l_n - j_n, dim);
    if v.is_negative() {
        BigRational::zero()
    } else {
        v
    }
}

/// Offsets of selected children, in units of `2^{-j_{n+1}}` from the parent
/// center: odd integers `c` with `min_abs <= ‖c‖_∞ <= max_abs`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChildRule {
    pub min_abs: BigInt,
    pub max_abs: BigInt,
    /// Largest odd offset of any subcube inside the parent.
    pub grid_abs: BigInt,
}

impl ChildRule {
    pub fn new(j_n: u64, l_n: u64, j_next: u64) -> Self {
        // upper: 2^{-j_n} - 2^{-l_n} - 2^{-j_{n+1}}; lower: 2 * 2^{-l_n} + 2^{-j_{n+1}}
        let max_abs = pow2(j_next - j_n) - pow2(j_next - l_n) - 1;
        let min_abs = pow2(j_next - l_n + 1) + 1;
        let grid_abs = pow2(j_next - j_n) - 1;
        ChildRule { min_abs, max_abs, grid_abs }
    }

    /// Number of odd `c` with `|c| <= max_abs`, resp. `|c| < min_abs`.
    pub fn axis_counts(&self) -> (BigInt, BigInt) {
        let a = if self.max_abs.is_negative() { BigInt::zero() } else { &self.max_abs + 1 };
        let b = &self.min_abs - 1;
        (a, b)
    }

    pub fn count(&self, dim: u32) -> BigInt {
        let (a, b) = self.axis_counts();
        let b = b.min(a.clone());
        num_traits::pow(a, dim as usize) - num_traits::pow(b, dim as usize)
    }

    pub fn selects(&self, offset: &[BigInt]) -> bool {
        let odd = offset.iter().all(|c| c.bit(0));
        let norm = offset.iter().map(|c| c.abs()).max().unwrap_or_default();
        odd && norm >= self.min_abs && norm <= self.max_abs
    }
}

impl ParamSequence {
    /// Strict parameters from `j`, with `k` and `l` by the exact formulas
    /// (floored when `j` is not a multiple of 3, which validation reports).
    pub fn strict(dim: u32, j: Vec<u64>) -> Result<Self, CubeError> {
        let l = j.windows(2).map(|w| strict_l(w[0], w[1])).collect();
        Self::assemble(dim, j, l, Mode::Strict)
    }

    pub fn default_strict(dim: u32) -> Self {
        Self::strict(dim, DEFAULT_J.to_vec()).expect("default parameters are consistent")
    }

    /// Relaxed parameters: any increasing `j`; `l` given or floor-derived.
    pub fn relaxed(dim: u32, j: Vec<u64>, l: Option<Vec<u64>>) -> Result<Self, CubeError> {
        let l = l.unwrap_or_else(|| j.windows(2).map(|w| strict_l(w[0], w[1])).collect());
        Self::assemble(dim, j, l, Mode::Relaxed)
    }

    /// Same `j` with an overridden `l`, keeping the mode.
    pub fn with_l(&self, l: Vec<u64>) -> Result<Self, CubeError> {
        Self::assemble(self.dim, self.j.clone(), l, self.mode)
    }

    fn assemble(dim: u32, j: Vec<u64>, l: Vec<u64>, mode: Mode) -> Result<Self, CubeError> {
        if dim < 2 {
            return Err(CubeError::Config(format!("dimension must be at least 2, got {dim}")));
        }
        if j.len() < 2 {
            return Err(CubeError::Config("j needs at least two terms".into()));
        }
        if l.len() != j.len() - 1 {
            return Err(CubeError::Config(format!("l has {} terms, expected {}", l.len(), j.len() - 1)));
        }
        if let Some(n) = (0..j.len() - 1).find(|&n| j[n] >= j[n + 1]) {
            return Err(CubeError::Config(format!("j must increase strictly (j_{n} >= j_{})", n + 1)));
        }
        for (n, &ln) in l.iter().enumerate() {
            if ln < j[n] + 2 || ln >= j[n + 1] {
                return Err(CubeError::Config(format!(
                    "l_{n} = {ln} must satisfy j_n + 2 <= l_n < j_(n+1) ({} .. {})",
                    j[n] + 2,
                    j[n + 1]
                )));
            }
        }
        if j.last().copied().unwrap_or(0) > 1 << 20 {
            return Err(CubeError::Config("j too large".into()));
        }
        let k = j.iter().map(|&v| strict_k(v)).collect();
        let n_max = j.len() - 1;
        let a_exp = (0..n_max).map(|n| choose_a_exp(n, dim)).collect();
        let children: Vec<BigInt> = (0..n_max)
            .map(|n| ChildRule::new(j[n], l[n], j[n + 1]).count(dim))
            .collect();
        let mut eps = Vec::with_capacity(n_max);
        let mut card = BigInt::one();
        for (n, c) in children.iter().enumerate() {
            eps.push(if card.is_zero() {
                BigRational::zero()
            } else {
                BigRational::new(BigInt::one(), pow2(n as u64) * &card)
            });
            card *= c;
        }
        Ok(ParamSequence { dim, mode, j, k, l, a_exp, eps, children })
    }

    pub fn n_max(&self) -> usize {
        self.j.len() - 1
    }

    pub fn rule(&self, n: usize) -> ChildRule {
        ChildRule::new(self.j[n], self.l[n], self.j[n + 1])
    }

    /// `card(Q_n)`, for `n <= n_max`.
    pub fn card(&self, n: usize) -> BigInt {
        self.children[..n].iter().product()
    }

    pub fn a(&self, n: usize) -> Dyadic {
        Dyadic::pow2(-(self.a_exp[n] as i64))
    }
}

/// Check every constraint of the mode. Violations are data, never errors.
pub fn validate_params(p: &ParamSequence) -> Validation {
    let mut violations = Vec::new();
    let mut push = |rule: &str, level: usize, detail: String| {
        violations.push(Violation { rule: rule.into(), level, detail })
    };
    let n_max = p.n_max();
    let mut skipped = Vec::new();

    match p.mode {
        Mode::Strict => {
            if p.j[0] != 0 {
                push("j0 = 0", 0, format!("j_0 = {}", p.j[0]));
            }
            for (n, &jn) in p.j.iter().enumerate() {
                if jn % 3 != 0 {
                    push("j divisible by 3", n, format!("j_{n} = {jn}"));
                }
            }
            for n in 0..n_max {
                let need = 9 * (p.j[n] + 1);
                if p.j[n + 1] < need {
                    push(
                        "j growth",
                        n + 1,
                        format!("j_{} = {} < 9(j_{n}+1) = {need}", n + 1, p.j[n + 1]),
                    );
                }
                let want = strict_l(p.j[n], p.j[n + 1]);
                if p.l[n] != want {
                    push("l derivation", n, format!("l_{n} = {} but j gives {want}", p.l[n]));
                }
                // 2^{j_n - l_n} <= a_n = 2^{-m_n}
                if p.l[n] < p.j[n] + p.a_exp[n] {
                    push(
                        "growth inequality",
                        n,
                        format!("2^(j_{n} - l_{n}) = 2^-{} > a_{n} = 2^-{}", p.l[n] - p.j[n], p.a_exp[n]),
                    );
                }
            }
        }
        Mode::Relaxed => {
            skipped.extend(
                ["j0 = 0", "j divisible by 3", "j growth", "l derivation", "growth inequality"]
                    .map(String::from),
            );
        }
    }
    for n in 0..n_max {
        if !lemma_holds(&lemma_lhs(p.a_exp[n], p.dim), n) {
            push("lemma inequality", n, format!("a_{n} = 2^-{}", p.a_exp[n]));
        }
        if p.children[n].is_zero() {
            push("nonempty generation", n + 1, format!("no selected children at level {n}"));
        }
        let used = BigRational::from_integer(p.card(n)) * &p.eps[n];
        if used > BigRational::new(BigInt::one(), pow2(n as u64)) {
            push("norm budget", n, format!("card * eps = {used}"));
        }
    }
    for (n, &kn) in p.k.iter().enumerate() {
        if kn != strict_k(p.j[n]) {
            push("k derivation", n, format!("k_{n} = {kn}"));
        }
    }
    Validation { violations, skipped }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_sequences() {
        let p = ParamSequence::default_strict(2);
        assert_eq!(p.k, vec![0, 6, 60, 546]);
        assert_eq!(p.l, vec![4, 37, 334]);
        assert_eq!(auto_j(3), DEFAULT_J.to_vec());
        assert!(validate_params(&p).is_ok(), "{:?}", validate_params(&p));
    }

    #[test]
    fn choose_a_values() {
        assert_eq!(choose_a(0, 2), Dyadic::pow2(-3));
        assert_eq!(choose_a(1, 2), Dyadic::pow2(-3));
        assert_eq!(choose_a(2, 2), Dyadic::pow2(-4));
        assert_eq!(choose_a(3, 2), Dyadic::pow2(-5));
        // (3/4)^2 - (1/2)^2 = 5/16 < e^{-1}
        assert!(!lemma_holds(&lemma_lhs(2, 2), 0));
    }

    #[test]
    fn level_zero_factor() {
        let f = level_factor(0, 4, 2);
        assert_eq!(f, BigRational::new(221.into(), 256.into()));
    }

    #[test]
    fn j_growth_violation() {
        let p = ParamSequence::strict(2, vec![0, 6, 60]).unwrap();
        let v = validate_params(&p);
        assert!(v.violations.iter().any(|x| x.rule == "j growth" && x.detail.contains("9(j_0+1) = 9")));
    }

    #[test]
    fn corrupted_l_breaks_growth() {
        let p = ParamSequence::default_strict(2).with_l(vec![2, 37, 334]).unwrap();
        let v = validate_params(&p);
        assert!(v.violations.iter().any(|x| x.rule == "growth inequality"));
    }

    #[test]
    fn relaxed_flags_skipped_rules() {
        let p = ParamSequence::relaxed(2, vec![0, 4, 9], Some(vec![2, 6])).unwrap();
        let v = validate_params(&p);
        assert!(v.is_ok(), "{v:?}");
        assert!(v.skipped.iter().any(|s| s == "growth inequality"));
        assert_eq!(p.children, vec![BigInt::from(80), BigInt::from(320)]);
    }

    #[test]
    fn inconsistent_l_rejected() {
        assert!(ParamSequence::relaxed(2, vec![0, 4, 9], Some(vec![1, 6])).is_err());
        assert!(ParamSequence::relaxed(2, vec![0, 4, 9], Some(vec![2, 9])).is_err());
        assert!(ParamSequence::relaxed(2, vec![0, 4, 4], None).is_err());
    }
}
