//! Adaptive Gauss-Kronrod quadrature and improper `dt/t` integrals with
//! growth-based divergence certification.

use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use super::logscale::LogScale;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
    pub converged: bool,
}

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for (i, &x) in XGK.iter().enumerate().take(7) {
        let dx = half * x;
        let pair = f(center - dx) + f(center + dx);
        kronrod += WGK[i] * pair;
        if i % 2 == 1 {
            gauss += WG[i / 2] * pair;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

struct Piece {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Piece {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Globally adaptive G7/K15 on `[a, b]`, bisecting the worst piece until the
/// summed error estimate is below `abs_tol` or `max_subdivisions` is spent.
pub fn adaptive<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, abs_tol: f64, max_subdivisions: usize) -> QuadResult {
    if a == b {
        return QuadResult { value: 0.0, error: 0.0, evaluations: 0, converged: true };
    }
    let (v, e) = gk15(&f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Piece { a, b, value: v, error: e });
    let mut total = v;
    let mut err = e;
    let mut evaluations = 15;
    let mut splits = 0;
    while err > abs_tol && splits < max_subdivisions {
        if !total.is_finite() {
            break;
        }
        let worst = match heap.pop() {
            Some(p) => p,
            None => break,
        };
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // interval cannot be split further in floating point
            heap.push(worst);
            break;
        }
        let (v1, e1) = gk15(&f, worst.a, mid);
        let (v2, e2) = gk15(&f, mid, worst.b);
        evaluations += 30;
        splits += 1;
        total += v1 + v2 - worst.value;
        err += e1 + e2 - worst.error;
        heap.push(Piece { a: worst.a, b: mid, value: v1, error: e1 });
        heap.push(Piece { a: mid, b: worst.b, value: v2, error: e2 });
    }
    // re-sum to shed accumulated cancellation in the running totals
    let (value, error) = heap.iter().fold((0.0, 0.0), |(v, e), p| (v + p.value, e + p.error));
    QuadResult {
        value,
        error,
        evaluations,
        converged: error <= abs_tol && value.is_finite(),
    }
}

/// Controls for [`integrate_dt_over_t`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailOptions {
    /// Absolute tolerance per quadrature call.
    pub abs_tol: f64,
    /// Partial integrals above this value certify divergence.
    pub divergence_threshold: f64,
    pub max_subdivisions: usize,
    /// Last schedule point, as `ln ln (m / r)`.
    pub max_lnln: f64,
}

impl Default for TailOptions {
    fn default() -> Self {
        TailOptions {
            abs_tol: 1e-9,
            divergence_threshold: 1e6,
            max_subdivisions: 4000,
            max_lnln: 1e300,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum TailOutcome {
    Converged { value: f64, error: f64 },
    /// The partial integral over `(r, m]` exceeded the threshold, with
    /// `r = m * exp(-expm1(at_lnln))`.
    Divergent { partial: f64, at_lnln: f64 },
    Inconclusive { partial: f64, reason: String },
}

impl TailOutcome {
    pub fn value(&self) -> Option<f64> {
        match self {
            TailOutcome::Converged { value, .. } => Some(*value),
            _ => None,
        }
    }
}

/// Point `t = m * exp(-expm1(w))` in logarithmic form.
pub fn schedule_point(m: f64, w: f64) -> LogScale {
    let ln_m = m.ln();
    let s = w.exp_m1();
    if s.is_finite() && (ln_m - s).is_finite() {
        LogScale::Ln(ln_m - s)
    } else {
        LogScale::from_lnln_inv(w + (-(1.0 + ln_m) * (-w).exp()).ln_1p())
    }
}

/// Inverse of [`schedule_point`].
pub fn schedule_coordinate(m: f64, r: &LogScale) -> f64 {
    match *r {
        LogScale::Ln(lr) => (m.ln() - lr).ln_1p(),
        LogScale::NegExpExp(w) => w + ((1.0 + m.ln()) * (-w).exp()).ln_1p(),
    }
}

/// Breakpoints of the shrinking schedule in the `w` coordinate: first
/// `r_i = m * 10^{-3i}` for `i <= 100`, then `r -> exp(-ln(m/r)^2)`-style
/// jumps that double `w`.
fn schedule(max_lnln: f64) -> impl Iterator<Item = f64> {
    let first: Vec<f64> = (1..=100)
        .map(|i| (3.0 * i as f64 * std::f64::consts::LN_10).ln_1p())
        .collect();
    let last = *first.last().unwrap_or(&1.0);
    let tail = std::iter::successors(Some(2.0 * last), |w| Some(2.0 * w));
    first
        .into_iter()
        .chain(tail)
        .take_while(move |w| *w <= max_lnln)
}

/// `∫_r^m h(t) dt/t`, with `ln h` supplied on logarithmic points.
///
/// With `lower = None` the integral runs to `0`; divergence is then
/// certified when a partial integral over `(r_i, m]` exceeds
/// `opts.divergence_threshold`. The integral is evaluated in the coordinate
/// `w = ln(1 + ln(m/t))`, where `dt/t = -e^w dw`.
pub fn integrate_dt_over_t<F>(ln_h: F, m: f64, lower: Option<LogScale>, opts: &TailOptions) -> TailOutcome
where
    F: Fn(LogScale) -> f64,
{
    let end_w = match lower {
        Some(r) => {
            if r >= LogScale::from_value(m) {
                return TailOutcome::Converged { value: 0.0, error: 0.0 };
            }
            Some(schedule_coordinate(m, &r))
        }
        None => None,
    };
    let integrand = |w: f64| -> f64 {
        let lh = ln_h(schedule_point(m, w));
        if lh == f64::NEG_INFINITY {
            0.0
        } else {
            (lh + w).exp()
        }
    };

    let mut partial = 0.0;
    let mut error = 0.0;
    let mut prev_chunk = f64::INFINITY;
    let mut chunks = 0usize;
    let mut start = 0.0;
    for stop in schedule(opts.max_lnln).chain(end_w) {
        let stop = match end_w {
            Some(e) if stop >= e => e,
            _ => stop,
        };
        if stop <= start {
            continue;
        }
        let q = adaptive(&integrand, start, stop, opts.abs_tol, opts.max_subdivisions);
        if q.value.is_nan() {
            return TailOutcome::Inconclusive {
                partial,
                reason: format!("integrand undefined on [{start}, {stop}] (log-log coordinate)"),
            };
        }
        if q.value.is_infinite() {
            return TailOutcome::Divergent { partial: f64::INFINITY, at_lnln: stop };
        }
        partial += q.value;
        error += q.error;
        chunks += 1;
        if end_w.is_none() && partial > opts.divergence_threshold {
            return TailOutcome::Divergent { partial, at_lnln: stop };
        }
        if !q.converged {
            return TailOutcome::Inconclusive {
                partial,
                reason: format!(
                    "quadrature budget exhausted on [{start}, {stop}] (error {:.3e})",
                    q.error
                ),
            };
        }
        if let Some(e) = end_w {
            if stop >= e {
                return TailOutcome::Converged { value: partial, error };
            }
        } else if chunks >= 3 && q.value <= 0.1 * opts.abs_tol && q.value <= 0.5 * prev_chunk && partial > 0.0 {
            return TailOutcome::Converged { value: partial, error: error + q.value };
        }
        prev_chunk = q.value;
        start = stop;
    }
    if end_w.is_none() && partial == 0.0 {
        // a nonincreasing profile vanishing down to the last schedule point
        return TailOutcome::Converged { value: 0.0, error };
    }
    TailOutcome::Inconclusive {
        partial,
        reason: "schedule exhausted before convergence or divergence".into(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let q = adaptive(|x| 3.0 * x * x, 0.0, 2.0, 1e-12, 10);
        assert!((q.value - 8.0).abs() < 1e-13);
        assert!(q.converged);
    }

    #[test]
    fn integrable_endpoint_singularity() {
        let q = adaptive(|x: f64| 1.0 / x.sqrt(), 0.0, 1.0, 1e-9, 2000);
        assert!((q.value - 2.0).abs() < 1e-8, "{q:?}");
    }

    #[test]
    fn schedule_coordinates_invert() {
        for w in [0.5, 10.0, 650.0, 800.0, 1e40] {
            let t = schedule_point(2.0, w);
            let back = schedule_coordinate(2.0, &t);
            assert!((back - w).abs() <= 1e-9 * w.max(1.0), "{w} -> {back}");
        }
    }

    #[test]
    fn power_tail_converges() {
        // ∫_0^1 t^{1/2} dt/t = 2
        let out = integrate_dt_over_t(|t| 0.5 * t.ln(), 1.0, None, &TailOptions::default());
        match out {
            TailOutcome::Converged { value, .. } => assert!((value - 2.0).abs() < 1e-9),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn harmonic_tail_diverges() {
        // ∫_0^1 dt/t
        let out = integrate_dt_over_t(|_| 0.0, 1.0, None, &TailOptions::default());
        assert!(matches!(out, TailOutcome::Divergent { .. }), "{out:?}");
    }

    #[test]
    fn finite_lower_limit() {
        // ∫_{1/4}^1 t dt/t = 3/4
        let r = LogScale::from_value(0.25);
        let out = integrate_dt_over_t(|t| t.ln(), 1.0, Some(r), &TailOptions::default());
        assert!((out.value().unwrap() - 0.75).abs() < 1e-10, "{out:?}");
    }

    #[test]
    fn nan_integrand_is_inconclusive() {
        let out = integrate_dt_over_t(|_| f64::NAN, 1.0, None, &TailOptions::default());
        assert!(matches!(out, TailOutcome::Inconclusive { .. }));
    }
}
