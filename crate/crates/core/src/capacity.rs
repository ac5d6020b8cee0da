//! Lipschitz bumps witnessing that points have zero capacity.
//!
//! Given a profile `g*` outside `L^{N,1}` near the origin, the potential
//!
//! ```text
//! u(r) = ∫_r^{m_K} t^{1/N - 1} g*(t) dt
//! ```
//!
//! blows up as `r -> 0`, and
//!
//! ```text
//! φ(x) = τ                         |x| <= δ
//!        τ (λ u(Ω_N |x|^N) - Λ)    δ <= |x| <= ε/2
//!        0                         |x| >= ε/2
//! ```
//!
//! with `λ = 1 / (u(Ω_N δ^N) - u(Ω_N (ε/2)^N))`, `Λ = λ u(Ω_N (ε/2)^N)` is
//! Lipschitz with `Lip φ(x) = τ C_N λ g*(Ω_N |x|^N)` on the shell. Since
//! `λ -> 0` as `δ -> 0`, the Lorentz norm of `Lip φ` can be made as small as
//! wanted while the plateau stays at height `τ`.
//!
//! For the default log profile `u(r) = ln ln(e/r)`, so useful inner radii are
//! far below `f64` range; `δ` is a [`LogScale`].

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lorentz::{lorentz_norm, LorentzError, LorentzIndex, NormValue, RadialProfile};
use crate::numeric::dyadic::dist2;
use crate::numeric::quad::{integrate_dt_over_t, TailOptions, TailOutcome};
use crate::numeric::{Dyadic, LogScale};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CapacityError {
    #[error("invalid bump spec: {0}")]
    InvalidSpec(String),
    #[error("profile not capacity-degenerate: budget unreachable as δ→0")]
    NotDegenerate,
    #[error("norm of the profile near the origin is {0}; pick an index it belongs to")]
    IndexNotAdmissible(String),
    #[error("inconclusive: {0}")]
    Inconclusive(String),
    #[error(transparent)]
    Profile(#[from] LorentzError),
}

/// Volume `Ω_N` of the Euclidean unit ball.
pub fn unit_ball_volume(dim: u32) -> f64 {
    use std::f64::consts::PI;
    match dim {
        0 => 1.0,
        1 => 2.0,
        n => unit_ball_volume(n - 2) * 2.0 * PI / n as f64,
    }
}

/// `C_N = N Ω_N^{1/N}`: the derivative of `r ↦ u(Ω_N r^N)` is
/// `-C_N g*(Ω_N r^N)`.
pub fn lip_constant(dim: u32) -> f64 {
    let n = dim as f64;
    n * unit_ball_volume(dim).powf(1.0 / n)
}

/// Value of the potential `u`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum UValue {
    Finite { value: f64 },
    Divergent,
    Inconclusive { reason: String },
}

impl UValue {
    pub fn finite(&self) -> Option<f64> {
        match self {
            UValue::Finite { value } => Some(*value),
            _ => None,
        }
    }
}

/// `u(r) = ∫_r^{m_K} t^{1/N-1} g*(t) dt`, closed form when the profile has
/// one, otherwise quadrature. `r = 0` asks for `u(0)`.
pub fn u_value(profile: &RadialProfile, dim: u32, r: &LogScale, opts: &TailOptions) -> UValue {
    let m = profile.support_measure();
    if *r >= LogScale::from_value(m) {
        return UValue::Finite { value: 0.0 };
    }
    if r.is_zero() {
        if let Some(u0) = profile.u_at_zero_closed(dim) {
            return if u0.is_finite() { UValue::Finite { value: u0 } } else { UValue::Divergent };
        }
    } else if let Some(u) = profile.u_closed(dim, r) {
        return UValue::Finite { value: u };
    }
    let lower = if r.is_zero() { None } else { Some(*r) };
    let power = 1.0 / dim as f64;
    match integrate_dt_over_t(|t| profile.ln_weighted(t, power), m, lower, opts) {
        TailOutcome::Converged { value, .. } => UValue::Finite { value },
        TailOutcome::Divergent { .. } => UValue::Divergent,
        TailOutcome::Inconclusive { reason, .. } => UValue::Inconclusive { reason },
    }
}

fn default_index() -> LorentzIndex {
    LorentzIndex::new(2.0, 2.0).expect("valid index")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BumpSpec {
    pub center: Vec<Dyadic>,
    /// Support lies in the closed ball of radius `eps / 2`.
    pub eps: f64,
    /// Plateau height.
    pub tau: f64,
    pub profile: RadialProfile,
    /// Lorentz space measuring `Lip φ`.
    #[serde(default = "default_index")]
    pub index: LorentzIndex,
    pub norm_budget: f64,
}

impl BumpSpec {
    /// Default log profile in dimension `center.len()`, measured in `L^{N,2}`.
    pub fn log_default(center: Vec<Dyadic>, eps: f64, tau: f64, norm_budget: f64) -> Self {
        let dim = center.len() as u32;
        BumpSpec {
            center,
            eps,
            tau,
            profile: RadialProfile::log_critical(dim),
            index: LorentzIndex::new(dim as f64, 2.0f64.min(dim as f64)).expect("valid index"),
            norm_budget,
        }
    }

    pub fn dim(&self) -> u32 {
        self.center.len() as u32
    }

    pub fn validate(&self) -> Result<(), CapacityError> {
        let bad = |s: String| Err(CapacityError::InvalidSpec(s));
        if self.dim() < 2 {
            return bad(format!("dimension must be at least 2, got {}", self.dim()));
        }
        if !(self.eps.is_finite() && self.eps > 0.0 && self.eps < 4.0) {
            return bad(format!("eps must lie in (0, 4), got {}", self.eps));
        }
        if !(0.0..=1.0).contains(&self.tau) {
            return bad(format!("tau must lie in [0, 1], got {}", self.tau));
        }
        if !(self.norm_budget.is_finite() && self.norm_budget > 0.0) {
            return bad(format!("norm budget must be positive, got {}", self.norm_budget));
        }
        if self.index.q() <= 1.0 {
            return bad("Lip fields need an index with q > 1".into());
        }
        self.profile.validate()?;
        if self.outer_measure() > self.profile.monotone_limit() {
            return bad(format!(
                "shell measure {:e} leaves the range where the profile is nonincreasing ({:e})",
                self.outer_measure(),
                self.profile.monotone_limit()
            ));
        }
        Ok(())
    }

    /// `Ω_N (ε/2)^N`.
    pub fn outer_measure(&self) -> f64 {
        let n = self.dim();
        unit_ball_volume(n) * (self.eps / 2.0).powi(n as i32)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bump {
    pub spec: BumpSpec,
    /// Plateau radius.
    pub delta: LogScale,
    pub lambda: f64,
    pub big_lambda: f64,
    pub c_n: f64,
    /// `u(Ω_N δ^N)`.
    pub u_inner: f64,
    /// `u(Ω_N (ε/2)^N)`.
    pub u_outer: f64,
    /// Post-construction quadrature of `‖Lip φ‖` in `spec.index`.
    pub lip_norm: NormValue,
}

fn shell_measure(dim: u32, r: &LogScale) -> LogScale {
    if r.is_zero() {
        return *r;
    }
    r.pow_scale(dim as f64, unit_ball_volume(dim).ln())
}

fn finite_u(profile: &RadialProfile, dim: u32, r: &LogScale, opts: &TailOptions) -> Result<f64, CapacityError> {
    match u_value(profile, dim, r, opts) {
        UValue::Finite { value } => Ok(value),
        UValue::Divergent => Err(CapacityError::Inconclusive(format!("u diverges at r = {r:?}"))),
        UValue::Inconclusive { reason } => Err(CapacityError::Inconclusive(reason)),
    }
}

/// Build the bump, choosing `δ` by a monotone search.
///
/// `δ` runs through `w = ln ln(1/δ)` from `δ = ε/4` with steps
/// `w -> max(w + ln 2, 1.25 w)` until the sufficient bound
/// `τ C_N λ ‖g* χ_(0, Ω_N (ε/2)^N]‖ <= budget` holds; the annulus norm is then
/// computed and checked against the budget.
pub fn make_bump(spec: BumpSpec) -> Result<Bump, CapacityError> {
    make_bump_with(spec, &TailOptions::default())
}

pub fn make_bump_with(spec: BumpSpec, opts: &TailOptions) -> Result<Bump, CapacityError> {
    spec.validate()?;
    let dim = spec.dim();
    let c_n = lip_constant(dim);
    let outer = LogScale::from_value(spec.outer_measure());
    let u_outer = finite_u(&spec.profile, dim, &outer, opts)?;
    let start_w = (4.0 / spec.eps).ln().ln();

    if spec.tau == 0.0 {
        let delta = LogScale::from_value(spec.eps / 4.0);
        return finish(spec, delta, c_n, u_outer, opts, true);
    }

    match u_value(&spec.profile, dim, &LogScale::zero(), opts) {
        UValue::Divergent => {}
        UValue::Finite { .. } => return Err(CapacityError::NotDegenerate),
        UValue::Inconclusive { reason } => {
            return Err(CapacityError::Inconclusive(format!("u(0): {reason}")))
        }
    }

    let core = RadialProfile::annulus(spec.profile.clone(), LogScale::zero(), spec.outer_measure());
    let core_norm = match lorentz_norm(&core, spec.index, opts) {
        NormValue::Finite { value, error } => value + error,
        other => return Err(CapacityError::IndexNotAdmissible(format!("{other:?}"))),
    };
    let target_lambda = spec.norm_budget / (spec.tau * c_n * core_norm);

    let mut w = start_w;
    loop {
        let delta = LogScale::from_lnln_inv(w);
        let u_inner = finite_u(&spec.profile, dim, &shell_measure(dim, &delta), opts)?;
        let lambda = 1.0 / (u_inner - u_outer);
        if lambda > 0.0 && lambda <= target_lambda {
            let bump = finish(spec, delta, c_n, u_outer, opts, false)?;
            return match bump.lip_norm.upper() {
                Some(n) if n <= bump.spec.norm_budget => Ok(bump),
                Some(n) => Err(CapacityError::Inconclusive(format!(
                    "annulus norm {n} exceeds the budget despite the sufficient bound"
                ))),
                None => Err(CapacityError::Inconclusive(format!("annulus norm {:?}", bump.lip_norm))),
            };
        }
        w = (w + std::f64::consts::LN_2).max(1.25 * w);
        if w > opts.max_lnln {
            return Err(CapacityError::NotDegenerate);
        }
    }
}

/// `‖Lip φ‖` of the bump of `spec` with its plateau radius forced to `delta`.
pub fn lip_norm_for_delta(spec: &BumpSpec, delta: LogScale, opts: &TailOptions) -> Result<NormValue, CapacityError> {
    spec.validate()?;
    let dim = spec.dim();
    let u_outer = finite_u(&spec.profile, dim, &LogScale::from_value(spec.outer_measure()), opts)?;
    finish(spec.clone(), delta, lip_constant(dim), u_outer, opts, spec.tau == 0.0).map(|b| b.lip_norm)
}

fn finish(
    spec: BumpSpec,
    delta: LogScale,
    c_n: f64,
    u_outer: f64,
    opts: &TailOptions,
    zero: bool,
) -> Result<Bump, CapacityError> {
    let dim = spec.dim();
    let inner = shell_measure(dim, &delta);
    let u_inner = finite_u(&spec.profile, dim, &inner, opts)?;
    let lambda = 1.0 / (u_inner - u_outer);
    let big_lambda = lambda * u_outer;
    let lip_norm = if zero {
        NormValue::Finite { value: 0.0, error: 0.0 }
    } else {
        let shell = RadialProfile::annulus(spec.profile.clone(), inner, spec.outer_measure());
        match lorentz_norm(&shell, spec.index, opts) {
            NormValue::Finite { value, error } => {
                let s = spec.tau * c_n * lambda;
                NormValue::Finite { value: s * value, error: s * error }
            }
            other => other,
        }
    };
    Ok(Bump { spec, delta, lambda, big_lambda, c_n, u_inner, u_outer, lip_norm })
}

impl Bump {
    pub fn tau(&self) -> f64 {
        self.spec.tau
    }

    pub fn center(&self) -> &[Dyadic] {
        &self.spec.center
    }

    /// Radius of the support, `ε/2`.
    pub fn outer_radius(&self) -> f64 {
        self.spec.eps / 2.0
    }

    fn u_at_radius(&self, r: &LogScale) -> f64 {
        let dim = self.spec.dim();
        u_value(&self.spec.profile, dim, &shell_measure(dim, r), &TailOptions::default())
            .finite()
            .unwrap_or(f64::NAN)
    }

    /// `φ / τ` at distance `r` from the center, in `[0, 1]`.
    pub fn shape_at_radius(&self, r: &LogScale) -> f64 {
        if *r >= LogScale::from_value(self.outer_radius()) {
            return 0.0;
        }
        if *r <= self.delta {
            return 1.0;
        }
        (self.lambda * (self.u_at_radius(r) - self.u_outer)).clamp(0.0, 1.0)
    }

    /// `φ` at distance `r` from the center.
    pub fn value_at_radius(&self, r: &LogScale) -> f64 {
        let tau = self.spec.tau;
        if tau == 0.0 {
            return 0.0;
        }
        tau * self.shape_at_radius(r)
    }

    /// The same bump moved to another center.
    pub fn recentered(&self, center: Vec<Dyadic>) -> Bump {
        let mut b = self.clone();
        b.spec.center = center;
        b
    }

    /// `Lip φ` at distance `r` from the center.
    pub fn lip_at_radius(&self, r: &LogScale) -> f64 {
        let tau = self.spec.tau;
        if tau == 0.0 || *r < self.delta || *r > LogScale::from_value(self.outer_radius()) {
            return 0.0;
        }
        let dim = self.spec.dim();
        let g = self.spec.profile.ln_value(shell_measure(dim, r)).exp();
        tau * self.c_n * self.lambda * g
    }

    /// `ln Lip φ` at distance `r`, `-inf` off the shell; finite even where
    /// `Lip φ` itself overflows.
    pub fn ln_lip_at_radius(&self, r: &LogScale) -> f64 {
        let tau = self.spec.tau;
        if tau == 0.0 || *r < self.delta || *r > LogScale::from_value(self.outer_radius()) {
            return f64::NEG_INFINITY;
        }
        let dim = self.spec.dim();
        (tau * self.c_n * self.lambda).ln() + self.spec.profile.ln_value(shell_measure(dim, r))
    }

    /// `ln(r Lip φ)` at distance `r`, `-inf` off the shell.
    pub fn ln_r_lip_at_radius(&self, r: &LogScale) -> f64 {
        let tau = self.spec.tau;
        if tau == 0.0 || *r < self.delta || *r > LogScale::from_value(self.outer_radius()) {
            return f64::NEG_INFINITY;
        }
        let dim = self.spec.dim();
        let inv = 1.0 / dim as f64;
        (tau * self.c_n * self.lambda).ln() - inv * unit_ball_volume(dim).ln()
            + self.spec.profile.ln_weighted(shell_measure(dim, r), inv)
    }

    /// Mismatch of the two formulas at `|x| = δ` and at `|x| = ε/2`.
    pub fn continuity_mismatch(&self) -> (f64, f64) {
        let tau = self.spec.tau;
        let at_inner = tau * (self.lambda * self.u_inner - self.big_lambda) - tau;
        let at_outer = tau * (self.lambda * self.u_outer - self.big_lambda);
        (at_inner.abs(), at_outer.abs())
    }
}

/// Exact distance from the center, in logarithmic form.
pub fn radius_of(center: &[Dyadic], x: &[Dyadic]) -> LogScale {
    let d2 = dist2(center, x);
    if d2.is_zero() {
        LogScale::zero()
    } else {
        LogScale::from_ln(0.5 * d2.ln())
    }
}

fn to_dyadic(x: &[f64]) -> Vec<Dyadic> {
    x.iter()
        .map(|v| Dyadic::from_f64(*v).expect("finite coordinate"))
        .collect()
}

/// `φ(x)` for an exact point.
pub fn eval_bump(b: &Bump, x: &[Dyadic]) -> f64 {
    b.value_at_radius(&radius_of(b.center(), x))
}

/// `Lip φ(x)` for an exact point.
pub fn bump_lip(b: &Bump, x: &[Dyadic]) -> f64 {
    b.lip_at_radius(&radius_of(b.center(), x))
}

pub fn eval_bump_f64(b: &Bump, x: &[f64]) -> f64 {
    eval_bump(b, &to_dyadic(x))
}

pub fn bump_lip_f64(b: &Bump, x: &[f64]) -> f64 {
    bump_lip(b, &to_dyadic(x))
}
