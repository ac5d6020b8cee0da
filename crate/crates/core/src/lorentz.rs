//! Distribution functions, nonincreasing rearrangements and Lorentz norms.
//!
//! For `1 <= p < ∞`, `1 <= q <= p` the Lorentz norm is
//!
//! ```text
//! ‖f‖_{p,q} = ( ∫_0^∞ (t^{1/p} f*(t))^q dt/t )^{1/q}
//! ```
//!
//! Step functions are handled in closed form with exact dyadic bookkeeping of
//! breakpoints. Radial profiles (already nonincreasing, so `g = g*`) go
//! through [`crate::numeric::quad::integrate_dt_over_t`], which either
//! converges, certifies divergence from the growth of partial integrals, or
//! reports that it could not decide.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numeric::quad::{integrate_dt_over_t, TailOptions, TailOutcome};
use crate::numeric::{Dyadic, LogScale};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LorentzError {
    #[error("invalid Lorentz index (p = {p}, q = {q}): need 1 <= q <= p < inf")]
    InvalidIndex { p: f64, q: f64 },
    #[error("invalid step function: {0}")]
    InvalidStep(String),
    #[error("invalid radial profile: {0}")]
    InvalidProfile(String),
    #[error("distribution level must be nonnegative, got {0}")]
    NegativeLevel(f64),
}

/// Exponents of the Lorentz space `L^{p,q}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "(f64, f64)", into = "(f64, f64)")]
pub struct LorentzIndex {
    p: f64,
    q: f64,
}

impl LorentzIndex {
    pub fn new(p: f64, q: f64) -> Result<Self, LorentzError> {
        if p.is_finite() && q.is_finite() && 1.0 <= q && q <= p {
            Ok(LorentzIndex { p, q })
        } else {
            Err(LorentzError::InvalidIndex { p, q })
        }
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> f64 {
        self.q
    }
}

impl TryFrom<(f64, f64)> for LorentzIndex {
    type Error = LorentzError;
    fn try_from((p, q): (f64, f64)) -> Result<Self, Self::Error> {
        LorentzIndex::new(p, q)
    }
}

impl From<LorentzIndex> for (f64, f64) {
    fn from(idx: LorentzIndex) -> Self {
        (idx.p, idx.q)
    }
}

/// Nonnegative step function on `[0, ∞)`: value `values[i]` on
/// `[breakpoints[i], breakpoints[i+1])`, zero from the last breakpoint on.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "StepRepr", into = "StepRepr")]
pub struct StepFunction {
    breakpoints: Vec<Dyadic>,
    values: Vec<f64>,
    rearranged: bool,
}

#[derive(Serialize, Deserialize)]
struct StepRepr {
    breakpoints: Vec<f64>,
    values: Vec<f64>,
    #[serde(default)]
    rearranged: bool,
}

impl TryFrom<StepRepr> for StepFunction {
    type Error = LorentzError;
    fn try_from(r: StepRepr) -> Result<Self, Self::Error> {
        let f = StepFunction::new(&r.breakpoints, &r.values)?;
        if r.rearranged && !f.values.windows(2).all(|w| w[0] >= w[1]) {
            return Err(LorentzError::InvalidStep("flagged rearranged but values increase".into()));
        }
        Ok(StepFunction { rearranged: r.rearranged, ..f })
    }
}

impl From<StepFunction> for StepRepr {
    fn from(f: StepFunction) -> Self {
        StepRepr {
            breakpoints: f.breakpoints.iter().map(Dyadic::to_f64).collect(),
            values: f.values,
            rearranged: f.rearranged,
        }
    }
}

impl StepFunction {
    pub fn new(breakpoints: &[f64], values: &[f64]) -> Result<Self, LorentzError> {
        let bps = breakpoints
            .iter()
            .map(|&b| Dyadic::from_f64(b).ok_or_else(|| LorentzError::InvalidStep(format!("breakpoint {b} is not finite"))))
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_dyadic(bps, values.to_vec())
    }

    pub fn from_dyadic(breakpoints: Vec<Dyadic>, values: Vec<f64>) -> Result<Self, LorentzError> {
        if breakpoints.len() != values.len() + 1 {
            return Err(LorentzError::InvalidStep(format!(
                "{} breakpoints for {} values",
                breakpoints.len(),
                values.len()
            )));
        }
        if !breakpoints[0].is_zero() {
            return Err(LorentzError::InvalidStep("first breakpoint must be 0".into()));
        }
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(LorentzError::InvalidStep("breakpoints must increase strictly".into()));
        }
        if let Some(v) = values.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(LorentzError::InvalidStep(format!("value {v} is not finite and nonnegative")));
        }
        Ok(StepFunction { breakpoints, values, rearranged: false })
    }

    /// `h` on `[0, m)`.
    pub fn indicator(m: f64, h: f64) -> Result<Self, LorentzError> {
        Self::new(&[0.0, m], &[h])
    }

    pub fn zero() -> Self {
        StepFunction { breakpoints: vec![Dyadic::zero()], values: vec![], rearranged: true }
    }

    pub fn is_rearranged(&self) -> bool {
        self.rearranged
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn breakpoints(&self) -> &[Dyadic] {
        &self.breakpoints
    }

    /// `(start, end, value)` per piece.
    pub fn pieces(&self) -> impl Iterator<Item = (&Dyadic, &Dyadic, f64)> {
        self.breakpoints
            .windows(2)
            .zip(&self.values)
            .map(|(w, &v)| (&w[0], &w[1], v))
    }

    pub fn eval(&self, t: f64) -> f64 {
        if t < 0.0 {
            return 0.0;
        }
        let t = match Dyadic::from_f64(t) {
            Some(t) => t,
            None => return 0.0,
        };
        // pieces are closed on the left, open on the right
        let idx = self.breakpoints.partition_point(|b| b <= &t);
        if idx == 0 || idx > self.values.len() {
            0.0
        } else {
            self.values[idx - 1]
        }
    }

    /// `c * f` for `c >= 0`.
    pub fn scale(&self, c: f64) -> Result<Self, LorentzError> {
        let values = self.values.iter().map(|v| v * c).collect();
        let mut out = Self::from_dyadic(self.breakpoints.clone(), values)?;
        out.rearranged = self.rearranged;
        Ok(out)
    }
}

/// Exact measure of `{t : f(t) > alpha}`.
pub fn distribution_exact(f: &StepFunction, alpha: f64) -> Result<Dyadic, LorentzError> {
    if !(alpha >= 0.0) {
        return Err(LorentzError::NegativeLevel(alpha));
    }
    Ok(f.pieces()
        .filter(|(_, _, v)| *v > alpha)
        .fold(Dyadic::zero(), |acc, (a, b, _)| &acc + &(b - a)))
}

/// Measure of `{t : f(t) > alpha}`, rounded to the nearest float.
pub fn distribution_function(f: &StepFunction, alpha: f64) -> Result<f64, LorentzError> {
    distribution_exact(f, alpha).map(|d| d.to_f64())
}

/// Nonincreasing rearrangement: pieces sorted by value, equal values merged,
/// zero pieces dropped. Idempotent.
pub fn rearrangement(f: &StepFunction) -> StepFunction {
    let mut pieces: Vec<(f64, Dyadic)> = f
        .pieces()
        .filter(|(_, _, v)| *v > 0.0)
        .map(|(a, b, v)| (v, b - a))
        .collect();
    pieces.sort_by(|x, y| y.0.total_cmp(&x.0));
    let mut breakpoints = vec![Dyadic::zero()];
    let mut values: Vec<f64> = Vec::new();
    for (v, len) in pieces {
        let end = breakpoints.last().map(|b| b + &len).unwrap_or_default();
        if values.last() == Some(&v) {
            *breakpoints.last_mut().unwrap() = end;
        } else {
            values.push(v);
            breakpoints.push(end);
        }
    }
    debug_assert!(values.windows(2).all(|w| w[0] > w[1]));
    StepFunction { breakpoints, values, rearranged: true }
}

/// Closed-form `‖f‖_{p,q}` of a step function.
pub fn lorentz_norm_step(f: &StepFunction, idx: LorentzIndex) -> f64 {
    let rearranged = rearrangement(f);
    let r = idx.q / idx.p;
    let total: f64 = rearranged
        .pieces()
        .map(|(a, b, v)| {
            let (a, b) = (a.to_f64(), b.to_f64());
            v.powf(idx.q) * (idx.p / idx.q) * (b.powf(r) - a.powf(r))
        })
        .sum();
    total.powf(1.0 / idx.q)
}

/// User-supplied nonincreasing profile on `(0, support]`.
#[derive(Clone)]
pub struct CustomProfile {
    pub support: f64,
    pub eval: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl fmt::Debug for CustomProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomProfile").field("support", &self.support).finish_non_exhaustive()
    }
}

impl PartialEq for CustomProfile {
    fn eq(&self, other: &Self) -> bool {
        self.support == other.support && Arc::ptr_eq(&self.eval, &other.eval)
    }
}

/// A nonincreasing profile `g*` on `(0, m_K]`, the rearrangement of a
/// compactly supported function on `R^N`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum RadialProfile {
    /// `height` on `(0, measure)`.
    Indicator { height: f64, measure: f64 },
    /// `t^{-1/dim} (ln(e/t))^{-beta}` on `(0, 1]`: in `L^{dim,q}` exactly when
    /// `beta * q > 1`, and outside `L^{dim,1}` when `beta <= 1`. Nonincreasing
    /// only on `(0, e^{-dim*beta}]`; see [`RadialProfile::monotone_limit`].
    LogCritical { dim: u32, beta: f64 },
    /// `base(t + shift)` on `[0, end - shift)`: the rearrangement of the base
    /// profile restricted to the shell `shift <= t < end`.
    Annulus { base: Box<RadialProfile>, shift: LogScale, end: f64 },
    #[serde(skip)]
    Custom(CustomProfile),
}

impl RadialProfile {
    /// Default capacity-degenerate profile for dimension `dim`.
    pub fn log_critical(dim: u32) -> Self {
        RadialProfile::LogCritical { dim, beta: 1.0 }
    }

    pub fn custom(support: f64, eval: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        RadialProfile::Custom(CustomProfile { support, eval: Arc::new(eval) })
    }

    /// Shell restriction `base` to `[shift, end)`, rearranged.
    pub fn annulus(base: RadialProfile, shift: LogScale, end: f64) -> Self {
        RadialProfile::Annulus { base: Box::new(base), shift, end }
    }

    /// `m_K`, the measure of the support.
    pub fn support_measure(&self) -> f64 {
        match self {
            RadialProfile::Indicator { measure, .. } => *measure,
            RadialProfile::LogCritical { .. } => 1.0,
            RadialProfile::Annulus { shift, end, .. } => end - shift.value(),
            RadialProfile::Custom(c) => c.support,
        }
    }

    /// Right end of the range on which the profile is nonincreasing.
    pub fn monotone_limit(&self) -> f64 {
        match self {
            RadialProfile::LogCritical { dim, beta } => (-(*dim as f64) * beta).exp(),
            RadialProfile::Annulus { base, shift, end } => {
                let lim = base.monotone_limit();
                if *end <= lim {
                    end - shift.value()
                } else {
                    (lim - shift.value()).max(0.0)
                }
            }
            _ => self.support_measure(),
        }
    }

    pub fn validate(&self) -> Result<(), LorentzError> {
        let bad = |s: String| Err(LorentzError::InvalidProfile(s));
        match self {
            RadialProfile::Indicator { height, measure } => {
                if !(height.is_finite() && *height >= 0.0 && measure.is_finite() && *measure > 0.0) {
                    return bad(format!("indicator needs height >= 0 and measure > 0, got {height}, {measure}"));
                }
            }
            RadialProfile::LogCritical { dim, beta } => {
                if *dim < 1 || !(beta.is_finite() && *beta > 0.0) {
                    return bad(format!("log-critical needs dim >= 1 and beta > 0, got {dim}, {beta}"));
                }
            }
            RadialProfile::Annulus { base, shift, end } => {
                base.validate()?;
                if !(*end > 0.0 && *end <= base.support_measure() && shift.value() < *end) {
                    return bad(format!("annulus end {end} must lie in (shift, m_K]"));
                }
            }
            RadialProfile::Custom(c) => {
                if !(c.support.is_finite() && c.support > 0.0) {
                    return bad(format!("support must be positive, got {}", c.support));
                }
            }
        }
        // spot-check monotonicity and finiteness on a logarithmic grid
        let m = self.monotone_limit();
        if !(m > 0.0) {
            return bad("profile has no range of monotonicity".into());
        }
        let mut prev = f64::INFINITY;
        for i in (0..200).rev() {
            let t = m * (-(i as f64) * 0.35).exp();
            let v = self.value(t * (1.0 - 1e-12));
            if !(v.is_finite() && v >= 0.0) {
                return bad(format!("value at t = {t:e} is {v}"));
            }
            if v > prev * (1.0 + 1e-12) {
                return bad(format!("profile increases near t = {t:e}"));
            }
            prev = v;
        }
        Ok(())
    }

    /// `ln g*(t)`, `-inf` outside the support.
    pub fn ln_value(&self, t: LogScale) -> f64 {
        match self {
            RadialProfile::Indicator { height, measure } => {
                if t < LogScale::from_value(*measure) {
                    height.ln()
                } else {
                    f64::NEG_INFINITY
                }
            }
            RadialProfile::LogCritical { dim, beta } => {
                if t.ln() > 0.0 {
                    return f64::NEG_INFINITY;
                }
                let inv = t.ln_inv();
                inv / (*dim as f64) - beta * ln_one_plus_ln_inv(&t)
            }
            RadialProfile::Annulus { base, shift, end } => {
                if t >= LogScale::from_value(end - shift.value()) {
                    return f64::NEG_INFINITY;
                }
                base.ln_value(t.add(shift))
            }
            RadialProfile::Custom(c) => {
                let x = t.value();
                if x == 0.0 && !t.is_zero() {
                    f64::NAN
                } else if x >= c.support {
                    f64::NEG_INFINITY
                } else {
                    (c.eval)(x).ln()
                }
            }
        }
    }

    /// `ln(t^power * g*(t))`, arranged so that cancelling growth of the two
    /// factors does not produce `inf - inf`.
    pub fn ln_weighted(&self, t: LogScale, power: f64) -> f64 {
        match self {
            RadialProfile::LogCritical { dim, beta } => {
                if t.ln() > 0.0 {
                    return f64::NEG_INFINITY;
                }
                let c = power - 1.0 / (*dim as f64);
                let lead = if c == 0.0 { 0.0 } else { c * t.ln() };
                lead - beta * ln_one_plus_ln_inv(&t)
            }
            RadialProfile::Annulus { base, shift, end } => {
                if t >= LogScale::from_value(end - shift.value()) {
                    return f64::NEG_INFINITY;
                }
                let s = t.add(shift);
                if s == t {
                    return base.ln_weighted(t, power);
                }
                // t^p g(s) = s^p g(s) * (t/s)^p
                base.ln_weighted(s, power) + power * (t.ln() - s.ln())
            }
            _ => {
                let lv = self.ln_value(t);
                if lv == f64::NEG_INFINITY {
                    lv
                } else {
                    power * t.ln() + lv
                }
            }
        }
    }

    pub fn value(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return f64::INFINITY;
        }
        self.ln_value(LogScale::from_value(t)).exp()
    }

    /// Closed form of `∫_r^{m_K} t^{1/dim - 1} g*(t) dt` when one is known.
    pub fn u_closed(&self, dim: u32, r: &LogScale) -> Option<f64> {
        let n = dim as f64;
        match self {
            RadialProfile::Indicator { height, measure } => {
                let rr = r.value().min(*measure);
                Some(height * n * (measure.powf(1.0 / n) - rr.powf(1.0 / n)))
            }
            RadialProfile::LogCritical { dim: d, beta } if *d == dim => {
                if r.ln() >= 0.0 {
                    return Some(0.0);
                }
                // substitution s = ln(e/t): ∫_1^{s_r} s^{-beta} ds
                let ln_s = ln_one_plus_ln_inv(r);
                if (*beta - 1.0).abs() < 1e-15 {
                    Some(ln_s)
                } else {
                    Some((((1.0 - beta) * ln_s).exp() - 1.0) / (1.0 - beta))
                }
            }
            _ => None,
        }
    }

    /// Closed form of `u(0)`, `inf` when the profile is capacity-degenerate.
    pub fn u_at_zero_closed(&self, dim: u32) -> Option<f64> {
        match self {
            RadialProfile::Indicator { .. } => self.u_closed(dim, &LogScale::zero()),
            RadialProfile::LogCritical { dim: d, beta } if *d == dim => {
                if *beta <= 1.0 {
                    Some(f64::INFINITY)
                } else {
                    Some(1.0 / (beta - 1.0))
                }
            }
            _ => None,
        }
    }
}

/// `ln(1 + ln(1/t))` for `t <= 1`, stable deep into the doubly-logarithmic range.
fn ln_one_plus_ln_inv(t: &LogScale) -> f64 {
    match *t {
        LogScale::Ln(l) => (-l).ln_1p(),
        LogScale::NegExpExp(w) => w + (-w).exp().ln_1p(),
    }
}

/// Outcome of a norm computation that may diverge or stay undecided.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum NormValue {
    Finite { value: f64, error: f64 },
    /// A partial integral of the `q`-th power exceeded the threshold.
    Divergent { partial: f64 },
    Inconclusive { partial: f64, reason: String },
}

impl NormValue {
    pub fn finite(&self) -> Option<f64> {
        match self {
            NormValue::Finite { value, .. } => Some(*value),
            _ => None,
        }
    }

    /// Upper bound on the norm, when one is certified.
    pub fn upper(&self) -> Option<f64> {
        match self {
            NormValue::Finite { value, error } => Some(value + error),
            _ => None,
        }
    }

    pub fn is_divergent(&self) -> bool {
        matches!(self, NormValue::Divergent { .. })
    }
}

/// `‖g*‖_{p,q}` by quadrature of the profile.
pub fn lorentz_norm(profile: &RadialProfile, idx: LorentzIndex, opts: &TailOptions) -> NormValue {
    let m = profile.support_measure();
    let power = 1.0 / idx.p;
    let q = idx.q;
    let out = integrate_dt_over_t(|t| q * profile.ln_weighted(t, power), m, None, opts);
    match out {
        TailOutcome::Converged { value, error } => {
            let norm = value.powf(1.0 / q);
            // d(v^{1/q}) = v^{1/q - 1} dv / q
            let err = if value > 0.0 { norm / value * error / q } else { error.powf(1.0 / q) };
            NormValue::Finite { value: norm, error: err }
        }
        TailOutcome::Divergent { partial, .. } => NormValue::Divergent { partial },
        TailOutcome::Inconclusive { partial, reason } => NormValue::Inconclusive { partial, reason },
    }
}

/// Norm of `x ↦ g*(Ω_N |x|^N)` on `R^N`. That function and `g*` share a
/// distribution function, so the norm is computed on the profile itself.
pub fn radial_map_norm(profile: &RadialProfile, dim: u32, idx: LorentzIndex, opts: &TailOptions) -> NormValue {
    debug_assert!(dim >= 1);
    lorentz_norm(profile, idx, opts)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_level() -> StepFunction {
        // 1 on [0,2), 2 on [2,3)
        StepFunction::new(&[0.0, 2.0, 3.0], &[1.0, 2.0]).unwrap()
    }

    #[test]
    fn distribution_examples() {
        assert_eq!(distribution_function(&StepFunction::zero(), 0.0).unwrap(), 0.0);
        let ind = StepFunction::indicator(3.0, 1.0).unwrap();
        assert_eq!(distribution_function(&ind, 0.5).unwrap(), 3.0);
        assert_eq!(distribution_function(&ind, 1.0).unwrap(), 0.0);
        let f = two_level();
        assert_eq!(distribution_function(&f, 1.5).unwrap(), 1.0);
        assert_eq!(distribution_function(&f, 0.5).unwrap(), 3.0);
        assert!(distribution_function(&f, -1.0).is_err());
    }

    #[test]
    fn rearrangement_examples() {
        let ind = StepFunction::new(&[0.0, 1.0, 4.0], &[0.0, 1.0]).unwrap();
        let r = rearrangement(&ind);
        assert_eq!(r.values(), &[1.0]);
        assert_eq!(r.breakpoints(), &[Dyadic::zero(), Dyadic::from_int(3)]);

        let r = rearrangement(&two_level());
        assert_eq!(r.values(), &[2.0, 1.0]);
        assert_eq!(r.eval(0.5), 2.0);
        assert_eq!(r.eval(1.0), 1.0);
        assert_eq!(r.eval(2.999), 1.0);
        assert_eq!(r.eval(3.0), 0.0);
        assert!(r.is_rearranged());
        assert_eq!(rearrangement(&r), r);
    }

    #[test]
    fn step_norm_examples() {
        let ind = StepFunction::indicator(1.0, 1.0).unwrap();
        let idx21 = LorentzIndex::new(2.0, 1.0).unwrap();
        assert!((lorentz_norm_step(&ind, idx21) - 2.0).abs() < 1e-15);
        let ind = StepFunction::indicator(5.0, 1.0).unwrap();
        let idx33 = LorentzIndex::new(3.0, 3.0).unwrap();
        assert!((lorentz_norm_step(&ind, idx33) - 5f64.powf(1.0 / 3.0)).abs() < 1e-14);
    }

    #[test]
    fn index_bounds() {
        assert!(LorentzIndex::new(2.0, 3.0).is_err());
        assert!(LorentzIndex::new(2.0, 0.5).is_err());
        assert!(LorentzIndex::new(f64::INFINITY, 1.0).is_err());
        assert!(LorentzIndex::new(1.0, 1.0).is_ok());
    }

    #[test]
    fn invalid_steps_rejected() {
        assert!(StepFunction::new(&[0.0, 1.0, 1.0], &[1.0, 2.0]).is_err());
        assert!(StepFunction::new(&[0.5, 1.0], &[1.0]).is_err());
        assert!(StepFunction::new(&[0.0, 1.0], &[-1.0]).is_err());
        assert!(StepFunction::new(&[0.0, 1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn log_profile_closed_u() {
        let g = RadialProfile::log_critical(2);
        for r in [0.5, 1e-3, 1e-200] {
            let u = g.u_closed(2, &LogScale::from_value(r)).unwrap();
            assert!((u - (1.0 - r.ln()).ln()).abs() < 1e-12);
        }
        assert_eq!(g.u_at_zero_closed(2), Some(f64::INFINITY));
        let deep = g.u_closed(2, &LogScale::from_lnln_inv(1e55)).unwrap();
        assert!((deep - 1e55).abs() / 1e55 < 1e-15);
    }

    #[test]
    fn zero_profile_norm() {
        let z = RadialProfile::Indicator { height: 0.0, measure: 1.0 };
        let idx = LorentzIndex::new(2.0, 2.0).unwrap();
        assert_eq!(lorentz_norm(&z, idx, &TailOptions::default()).finite(), Some(0.0));
    }

    #[test]
    fn profile_validation() {
        RadialProfile::log_critical(2).validate().unwrap();
        let g = RadialProfile::log_critical(2);
        assert!(g.value(0.5) > g.value(0.3));
        let shell = RadialProfile::annulus(g.clone(), LogScale::from_value(1e-4), 0.1);
        shell.validate().unwrap();
        assert_eq!(shell.monotone_limit(), 0.1 - 1e-4);
        assert!(RadialProfile::custom(1.0, |t| t).validate().is_err());
        assert!(RadialProfile::Indicator { height: 1.0, measure: -1.0 }.validate().is_err());
    }

    #[test]
    fn profile_json_schema() {
        let g = RadialProfile::log_critical(3);
        let s = serde_json::to_string(&g).unwrap();
        assert_eq!(s, r#"{"name":"log_critical","dim":3,"beta":1.0}"#);
        let back: RadialProfile = serde_json::from_str(&s).unwrap();
        assert_eq!(back, g);
        let f: StepFunction = serde_json::from_str(r#"{"breakpoints":[0,1,3],"values":[2,1]}"#).unwrap();
        assert_eq!(f.values(), &[2.0, 1.0]);
        assert!(serde_json::from_str::<StepFunction>(r#"{"breakpoints":[0,1,3],"values":[1,2],"rearranged":true}"#).is_err());
    }

    #[test]
    fn log_profile_norms() {
        let g = RadialProfile::log_critical(2);
        let opts = TailOptions::default();
        let n22 = lorentz_norm(&g, LorentzIndex::new(2.0, 2.0).unwrap(), &opts);
        assert!((n22.finite().unwrap() - 1.0).abs() < 1e-6, "{n22:?}");
        let n21 = radial_map_norm(&g, 2, LorentzIndex::new(2.0, 1.0).unwrap(), &opts);
        assert!(n21.is_divergent(), "{n21:?}");
    }

    #[test]
    fn indicator_profile_matches_step() {
        let opts = TailOptions::default();
        for (m, p, q) in [(1.0, 2.0, 1.0), (0.3, 3.0, 2.0), (2.5, 1.5, 1.5)] {
            let idx = LorentzIndex::new(p, q).unwrap();
            let prof = RadialProfile::Indicator { height: 1.0, measure: m };
            let step = StepFunction::indicator(m, 1.0).unwrap();
            let a = lorentz_norm(&prof, idx, &opts).finite().unwrap();
            let b = lorentz_norm_step(&step, idx);
            assert!((a - b).abs() < 1e-8 * b, "{a} vs {b}");
        }
    }
}
