//! Numerical checks of the gradient inequalities on sampled fields.
//!
//! Fields live on the uniform grid of `[-1, 1]^N` with `nodes` points per
//! axis and are extended by multilinear interpolation. Line integrals along
//! polygonal curves go through [`CurveField::segment_integral`], which radial
//! fields override with a logarithmic substitution so that mass concentrated
//! at tiny radii is not lost.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::capacity::Bump;
use crate::lorentz::{lorentz_norm_step, LorentzIndex, StepFunction};
use crate::numeric::quad::adaptive;
use crate::numeric::LogScale;

#[derive(Debug, Error)]
pub enum GradError {
    #[error("invalid field: {0}")]
    InvalidField(String),
    #[error("maximal function needs at least one radius")]
    EmptyRadii,
    #[error("invalid radius {0}")]
    InvalidRadius(f64),
    #[error("invalid curve: {0}")]
    InvalidCurve(String),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

/// Samples on the uniform grid of `[-1, 1]^N`, axis 0 varying fastest.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridField {
    dim: u32,
    nodes: usize,
    values: Vec<f64>,
}

impl GridField {
    pub fn new(dim: u32, nodes: usize, values: Vec<f64>) -> Result<Self, GradError> {
        if dim == 0 || nodes < 2 {
            return Err(GradError::InvalidField(format!("dim {dim}, {nodes} nodes per axis")));
        }
        let count = nodes
            .checked_pow(dim)
            .ok_or_else(|| GradError::InvalidField("grid too large".into()))?;
        if values.len() != count {
            return Err(GradError::InvalidField(format!("expected {count} values, got {}", values.len())));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite() || **v < 0.0) {
            return Err(GradError::InvalidField(format!("value {v} is not finite and nonnegative")));
        }
        Ok(GridField { dim, nodes, values })
    }

    pub fn from_fn(dim: u32, nodes: usize, mut f: impl FnMut(&[f64]) -> f64) -> Result<Self, GradError> {
        let count = nodes.pow(dim);
        let mut x = vec![0.0; dim as usize];
        let mut values = Vec::with_capacity(count);
        let h = 2.0 / (nodes - 1) as f64;
        for i in 0..count {
            let mut rest = i;
            for c in x.iter_mut() {
                *c = -1.0 + (rest % nodes) as f64 * h;
                rest /= nodes;
            }
            values.push(f(&x));
        }
        GridField::new(dim, nodes, values)
    }

    pub fn dim(&self) -> u32 {
        self.dim
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    /// Grid spacing.
    pub fn h(&self) -> f64 {
        2.0 / (self.nodes - 1) as f64
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    fn multi_index(&self, mut i: usize) -> Vec<usize> {
        (0..self.dim)
            .map(|_| {
                let c = i % self.nodes;
                i /= self.nodes;
                c
            })
            .collect()
    }

    fn flat(&self, idx: &[usize]) -> usize {
        idx.iter().rev().fold(0, |acc, &c| acc * self.nodes + c)
    }

    pub fn node(&self, i: usize) -> Vec<f64> {
        let h = self.h();
        self.multi_index(i).into_iter().map(|c| -1.0 + c as f64 * h).collect()
    }

    /// Multilinear interpolation; points outside the cube are clamped to it.
    pub fn interpolate(&self, x: &[f64]) -> f64 {
        let h = self.h();
        let mut base = Vec::with_capacity(x.len());
        let mut frac = Vec::with_capacity(x.len());
        for &c in x {
            let t = ((c.clamp(-1.0, 1.0) + 1.0) / h).max(0.0);
            let i = (t.floor() as usize).min(self.nodes - 2);
            base.push(i);
            frac.push((t - i as f64).clamp(0.0, 1.0));
        }
        let mut sum = 0.0;
        let mut idx = base.clone();
        for corner in 0..(1usize << self.dim) {
            let mut w = 1.0;
            for d in 0..self.dim as usize {
                if corner >> d & 1 == 1 {
                    idx[d] = base[d] + 1;
                    w *= frac[d];
                } else {
                    idx[d] = base[d];
                    w *= 1.0 - frac[d];
                }
            }
            if w != 0.0 {
                sum += w * self.values[self.flat(&idx)];
            }
        }
        sum
    }

    /// `node,value` rows with a header.
    pub fn to_csv(&self) -> Result<String, GradError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["node", "value"])?;
        for (i, v) in self.values.iter().enumerate() {
            w.serialize((i, v))?;
        }
        let bytes = w.into_inner().map_err(|e| GradError::InvalidField(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    /// Reads `node,value` rows; the number of nodes per axis is inferred.
    pub fn from_csv(dim: u32, text: &str) -> Result<Self, GradError> {
        let mut r = csv::Reader::from_reader(text.as_bytes());
        let mut rows: Vec<(usize, f64)> = Vec::new();
        for rec in r.deserialize() {
            rows.push(rec?);
        }
        if dim == 0 {
            return Err(GradError::InvalidField("dim 0".into()));
        }
        let nodes = (rows.len() as f64).powf(1.0 / dim as f64).round() as usize;
        if nodes < 2 || nodes.checked_pow(dim) != Some(rows.len()) {
            return Err(GradError::InvalidField(format!("{} rows is not a full grid in dimension {dim}", rows.len())));
        }
        let mut values = vec![f64::NAN; rows.len()];
        for (i, v) in rows {
            let slot = values
                .get_mut(i)
                .ok_or_else(|| GradError::InvalidField(format!("node index {i} out of range")))?;
            *slot = v;
        }
        if values.iter().any(|v| v.is_nan()) {
            return Err(GradError::InvalidField("missing or duplicate node index".into()));
        }
        GridField::new(dim, nodes, values)
    }
}

/// Integer offsets within Euclidean distance `r / h`.
fn ball_offsets(dim: u32, r_cells: f64) -> Vec<Vec<i64>> {
    let m = (r_cells + 1e-9).floor() as i64;
    let side = (2 * m + 1) as usize;
    let total = side.pow(dim);
    let mut out = Vec::new();
    for i in 0..total {
        let mut rest = i;
        let v: Vec<i64> = (0..dim)
            .map(|_| {
                let c = (rest % side) as i64 - m;
                rest /= side;
                c
            })
            .collect();
        let n2: i64 = v.iter().map(|c| c * c).sum();
        if (n2 as f64).sqrt() <= r_cells + 1e-9 {
            out.push(v);
        }
    }
    out
}

/// Discrete `M_q g(x) = sup_r ( mean_{B(x, r)} g^q )^{1/q}` over Euclidean
/// balls of the given radii intersected with the grid. Radius 0 (the node
/// alone) is always included, so `M_q g >= g` at every node.
pub fn maximal_function(g: &GridField, q: f64, radii: &[f64]) -> Result<GridField, GradError> {
    if radii.is_empty() {
        return Err(GradError::EmptyRadii);
    }
    if !(q.is_finite() && q >= 1.0) {
        return Err(GradError::InvalidField(format!("exponent q = {q}")));
    }
    if let Some(&r) = radii.iter().find(|r| !r.is_finite() || **r < 0.0) {
        return Err(GradError::InvalidRadius(r));
    }
    let h = g.h();
    let balls: Vec<Vec<Vec<i64>>> = radii.iter().map(|r| ball_offsets(g.dim, r / h)).collect();
    let powered: Vec<f64> = g.values.iter().map(|v| v.powf(q)).collect();
    let n = g.nodes as i64;
    let mut out = Vec::with_capacity(g.values.len());
    let mut idx = vec![0usize; g.dim as usize];
    for i in 0..g.values.len() {
        let base = g.multi_index(i);
        let mut best = g.values[i];
        for ball in &balls {
            let mut sum = 0.0;
            let mut count = 0usize;
            'offsets: for off in ball {
                for d in 0..base.len() {
                    let c = base[d] as i64 + off[d];
                    if c < 0 || c >= n {
                        continue 'offsets;
                    }
                    idx[d] = c as usize;
                }
                sum += powered[g.flat(&idx)];
                count += 1;
            }
            let mean = (sum / count as f64).powf(1.0 / q);
            if mean > best {
                best = mean;
            }
        }
        out.push(best);
    }
    GridField::new(g.dim, g.nodes, out)
}

/// `‖g‖_{p,q}` of the step function that gives every node a cell of
/// measure `h^N`.
pub fn grid_lorentz_norm(g: &GridField, idx: LorentzIndex) -> f64 {
    let cell = g.h().powi(g.dim as i32);
    let breakpoints: Vec<f64> = (0..=g.values.len()).map(|i| i as f64 * cell).collect();
    let step = StepFunction::new(&breakpoints, &g.values).expect("grid cells give a valid step function");
    lorentz_norm_step(&step, idx)
}

/// `‖M g‖_{p,q} / ‖g‖_{p,q}`, or `None` when `g` vanishes.
pub fn maximal_lorentz_ratio(g: &GridField, mg: &GridField, idx: LorentzIndex) -> Option<f64> {
    let base = grid_lorentz_norm(g, idx);
    (base > 0.0).then(|| grid_lorentz_norm(mg, idx) / base)
}

/// A polygonal curve through the given vertices.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolyCurve {
    points: Vec<Vec<f64>>,
    #[serde(skip)]
    cumulative: Vec<f64>,
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

fn lerp(a: &[f64], b: &[f64], t: f64) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + t * (y - x)).collect()
}

impl PolyCurve {
    pub fn new(points: Vec<Vec<f64>>) -> Result<Self, GradError> {
        if points.len() < 2 {
            return Err(GradError::InvalidCurve("need at least two vertices".into()));
        }
        let dim = points[0].len();
        if dim == 0 || points.iter().any(|p| p.len() != dim || p.iter().any(|c| !c.is_finite())) {
            return Err(GradError::InvalidCurve("vertices must share a positive dimension".into()));
        }
        let mut cumulative = vec![0.0];
        for w in points.windows(2) {
            let d = dist(&w[0], &w[1]);
            if d == 0.0 {
                return Err(GradError::InvalidCurve("repeated vertex".into()));
            }
            cumulative.push(cumulative.last().unwrap() + d);
        }
        Ok(PolyCurve { points, cumulative })
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn length(&self) -> f64 {
        *self.cumulative.last().unwrap()
    }

    fn segment_at(&self, s: f64) -> usize {
        let i = self.cumulative.partition_point(|&c| c <= s);
        i.clamp(1, self.points.len() - 1) - 1
    }

    /// Point at arc length `s`, clamped to `[0, length]`.
    pub fn point_at(&self, s: f64) -> Vec<f64> {
        let s = s.clamp(0.0, self.length());
        let i = self.segment_at(s);
        let seg = self.cumulative[i + 1] - self.cumulative[i];
        lerp(&self.points[i], &self.points[i + 1], ((s - self.cumulative[i]) / seg).clamp(0.0, 1.0))
    }

    /// Straight pieces covering arc length `[a, b]`.
    pub fn pieces(&self, a: f64, b: f64) -> Vec<(Vec<f64>, Vec<f64>)> {
        let (a, b) = (a.clamp(0.0, self.length()), b.clamp(0.0, self.length()));
        if b <= a {
            return Vec::new();
        }
        let mut out = Vec::new();
        let mut s = a;
        let mut start = self.point_at(a);
        let mut i = self.segment_at(a);
        while s < b {
            let end_s = self.cumulative[i + 1].min(b);
            let end = if end_s == b { self.point_at(b) } else { self.points[i + 1].clone() };
            if end_s > s {
                out.push((start, end.clone()));
            }
            s = end_s;
            start = end;
            i += 1;
            if i + 1 >= self.points.len() {
                break;
            }
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LineIntegral {
    pub value: f64,
    pub converged: bool,
}

const REL_TOL: f64 = 1e-9;

/// Composite midpoint rule, doubling until two successive values agree to
/// `1e-9` relative.
pub fn midpoint_integral(f: impl Fn(&[f64]) -> f64, p: &[f64], q: &[f64]) -> LineIntegral {
    let len = dist(p, q);
    if len == 0.0 {
        return LineIntegral { value: 0.0, converged: true };
    }
    let eval = |m: usize| -> f64 {
        let step = 1.0 / m as f64;
        (0..m).map(|i| f(&lerp(p, q, (i as f64 + 0.5) * step))).sum::<f64>() * step * len
    };
    let mut m = 4;
    let mut prev = eval(m);
    while m < 1 << 18 {
        m *= 2;
        let next = eval(m);
        if !next.is_finite() {
            return LineIntegral { value: next, converged: next == f64::INFINITY };
        }
        if (next - prev).abs() <= REL_TOL * next.abs() || (next == 0.0 && prev == 0.0 && m >= 64) {
            return LineIntegral { value: next, converged: true };
        }
        prev = next;
    }
    LineIntegral { value: prev, converged: false }
}

/// A nonnegative field that can be integrated along straight segments.
pub trait CurveField {
    fn value(&self, x: &[f64]) -> f64;

    fn segment_integral(&self, p: &[f64], q: &[f64]) -> LineIntegral {
        midpoint_integral(|x| self.value(x), p, q)
    }
}

impl CurveField for GridField {
    fn value(&self, x: &[f64]) -> f64 {
        self.interpolate(x)
    }
}

/// Adapter for plain closures.
pub struct FnField<F>(pub F);

impl<F: Fn(&[f64]) -> f64> CurveField for FnField<F> {
    fn value(&self, x: &[f64]) -> f64 {
        (self.0)(x)
    }
}

type LnRadial = Box<dyn Fn(&LogScale) -> f64 + Send + Sync>;

/// `G(|x - center|)` supported on `inner <= r <= outer`, given by
/// `ln(r G(r))`.
pub struct RadialField {
    center: Vec<f64>,
    inner: LogScale,
    outer: f64,
    ln_rg: LnRadial,
}

fn ln_add(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if lo == f64::NEG_INFINITY {
        return hi;
    }
    hi + (lo - hi).exp().ln_1p()
}

/// `ln sqrt(r^2 - d^2)` for `d < r`.
fn ln_leg(ln_r: f64, d: f64) -> f64 {
    if d == 0.0 {
        return ln_r;
    }
    let ratio = (d.ln() - ln_r).exp();
    ln_r + 0.5 * (-(ratio * ratio)).ln_1p()
}

impl RadialField {
    pub fn new(
        center: Vec<f64>,
        inner: LogScale,
        outer: f64,
        ln_rg: impl Fn(&LogScale) -> f64 + Send + Sync + 'static,
    ) -> Self {
        RadialField { center, inner, outer, ln_rg: Box::new(ln_rg) }
    }

    /// The Lip field of a capacity bump.
    pub fn bump_lip(b: &Bump) -> Self {
        let center = b.center().iter().map(|c| c.to_f64()).collect();
        let bump = b.clone();
        RadialField::new(center, b.delta, b.outer_radius(), move |r| bump.ln_r_lip_at_radius(r))
    }

    /// `∫_A^B G(sqrt(d^2 + σ^2)) dσ` with `σ = e^y`.
    fn leg_integral(&self, d: f64, a: f64, b: f64) -> LineIntegral {
        if d >= self.outer || b <= a {
            return LineIntegral { value: 0.0, converged: true };
        }
        let ln_d = if d > 0.0 { d.ln() } else { f64::NEG_INFINITY };
        let ln_b = ln_leg(self.outer.ln(), d).min(b.ln());
        let mut ln_a = if a > 0.0 { a.ln() } else { f64::NEG_INFINITY };
        if LogScale::from_value(d) < self.inner {
            ln_a = ln_a.max(ln_leg(self.inner.ln(), d));
        }
        if ln_a == f64::NEG_INFINITY {
            ln_a = ln_d.min(ln_b) - 40.0;
        }
        if ln_b <= ln_a {
            return LineIntegral { value: 0.0, converged: true };
        }
        // G(r) σ = r G(r) * σ / r
        let f = |y: f64| {
            let (ln_r, ln_ratio) = if d > 0.0 {
                (0.5 * ln_add(2.0 * ln_d, 2.0 * y), -0.5 * (2.0 * (ln_d - y)).exp().ln_1p())
            } else {
                (y, 0.0)
            };
            ((self.ln_rg)(&LogScale::from_ln(ln_r)) + ln_ratio).exp()
        };
        let rough = adaptive(f, ln_a, ln_b, 1e-6, 200);
        let tol = (REL_TOL * 0.1 * rough.value.abs()).max(1e-300);
        let fine = adaptive(f, ln_a, ln_b, tol, 4000);
        LineIntegral { value: fine.value, converged: fine.converged }
    }
}

impl CurveField for RadialField {
    fn value(&self, x: &[f64]) -> f64 {
        let r = dist(x, &self.center);
        let r = LogScale::from_value(r);
        if r < self.inner || r > LogScale::from_value(self.outer) {
            return 0.0;
        }
        ((self.ln_rg)(&r) - r.ln()).exp()
    }

    fn segment_integral(&self, p: &[f64], q: &[f64]) -> LineIntegral {
        let len = dist(p, q);
        if len == 0.0 {
            return LineIntegral { value: 0.0, converged: true };
        }
        let u: Vec<f64> = p.iter().zip(q).map(|(a, b)| (b - a) / len).collect();
        let w: Vec<f64> = p.iter().zip(&self.center).map(|(a, c)| a - c).collect();
        let s_star = -w.iter().zip(&u).map(|(a, b)| a * b).sum::<f64>();
        let r_p = dist(p, &self.center);
        let r_q = dist(q, &self.center);
        let d = w
            .iter()
            .zip(&u)
            .map(|(a, b)| (a + s_star * b).powi(2))
            .sum::<f64>()
            .sqrt()
            .min(r_p)
            .min(r_q);
        // leg lengths from the endpoint distances, so an endpoint on the
        // center gives exactly zero
        let leg = |r: f64, s: f64| (r * r - d * d).max(0.0).sqrt().copysign(s);
        let (lo, hi) = (leg(r_p, -s_star), leg(r_q, len - s_star));
        let legs = if lo >= 0.0 {
            vec![(lo, hi)]
        } else if hi <= 0.0 {
            vec![(-hi, -lo)]
        } else {
            vec![(0.0, -lo), (0.0, hi)]
        };
        legs.into_iter().fold(LineIntegral { value: 0.0, converged: true }, |acc, (a, b)| {
            let part = self.leg_integral(d, a, b);
            LineIntegral { value: acc.value + part.value, converged: acc.converged && part.converged }
        })
    }
}

/// Line integral of `g` over arc length `[a, b]` of the curve.
pub fn curve_integral(g: &dyn CurveField, curve: &PolyCurve, a: f64, b: f64) -> LineIntegral {
    curve
        .pieces(a, b)
        .iter()
        .fold(LineIntegral { value: 0.0, converged: true }, |acc, (p, q)| {
            let part = g.segment_integral(p, q);
            LineIntegral { value: acc.value + part.value, converged: acc.converged && part.converged }
        })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainReport {
    pub n: usize,
    pub length: f64,
    /// `|f(γ(0)) - f(γ(L))|`.
    pub lhs: f64,
    /// `Σ_k ∫_{I_k} g ds`.
    pub integral: f64,
    /// `4 ∫_γ g ds`.
    pub rhs: f64,
    /// `Σ |f(x_k) - f(x_{k+1})|` along the chain, endpoints included.
    pub telescoping: f64,
    /// `Σ d(x_k, x_{k+1}) (g(x_k) + g(x_{k+1}))`.
    pub pointwise_sum: f64,
    pub holds: bool,
    pub slack: f64,
    pub converged: bool,
    /// `∫ g = ∞`, so the inequality holds for free.
    pub vacuous: bool,
}

const CHAIN_SAMPLES: usize = 5;

/// Splits the curve into `n` arcs of equal length, integrates `g` on each
/// and picks in every arc the sampled point where `g` is smallest.
pub fn chain_inequality(
    f: &dyn Fn(&[f64]) -> f64,
    g: &dyn CurveField,
    curve: &PolyCurve,
    n: usize,
) -> ChainReport {
    let n = n.max(1);
    let length = curve.length();
    let start = curve.point_at(0.0);
    let end = curve.point_at(length);
    let lhs = (f(&start) - f(&end)).abs();
    let arc = length / n as f64;

    let mut integral = 0.0;
    let mut converged = true;
    let mut chain = Vec::with_capacity(n + 2);
    chain.push((start.clone(), g.value(&start)));
    for k in 0..n {
        let (a, b) = (k as f64 * arc, if k + 1 == n { length } else { (k + 1) as f64 * arc });
        let part = curve_integral(g, curve, a, b);
        integral += part.value;
        converged &= part.converged;
        let best = (0..CHAIN_SAMPLES)
            .map(|i| {
                let x = curve.point_at(a + (b - a) * (i as f64 + 0.5) / CHAIN_SAMPLES as f64);
                let v = g.value(&x);
                (x, v)
            })
            .min_by(|x, y| x.1.total_cmp(&y.1))
            .unwrap();
        chain.push(best);
    }
    chain.push((end.clone(), g.value(&end)));

    let mut telescoping = 0.0;
    let mut pointwise_sum = 0.0;
    for w in chain.windows(2) {
        telescoping += (f(&w[0].0) - f(&w[1].0)).abs();
        pointwise_sum += dist(&w[0].0, &w[1].0) * (w[0].1 + w[1].1);
    }

    let vacuous = integral == f64::INFINITY;
    let rhs = 4.0 * integral;
    ChainReport {
        n,
        length,
        lhs,
        integral,
        rhs,
        telescoping,
        pointwise_sum,
        holds: vacuous || lhs <= rhs,
        slack: rhs - lhs,
        converged: converged || vacuous,
        vacuous,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairViolation {
    pub pair: usize,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HajlaszReport {
    pub c: f64,
    pub checked: usize,
    pub violations: Vec<PairViolation>,
    /// Smallest constant for which every pair passes.
    pub min_c: f64,
}

impl HajlaszReport {
    pub fn passes(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Tests `|f(x) - f(y)| <= C |x - y| (M(x) + M(y))` on the given pairs.
pub fn hajlasz_pair_check(
    f: &dyn Fn(&[f64]) -> f64,
    m: &GridField,
    pairs: &[(Vec<f64>, Vec<f64>)],
    c: f64,
) -> HajlaszReport {
    let mut violations = Vec::new();
    let mut min_c: f64 = 0.0;
    for (i, (x, y)) in pairs.iter().enumerate() {
        let lhs = (f(x) - f(y)).abs();
        let base = dist(x, y) * (m.interpolate(x) + m.interpolate(y));
        if lhs > 0.0 {
            min_c = min_c.max(if base > 0.0 { lhs / base } else { f64::INFINITY });
        }
        let rhs = c * base;
        if lhs > rhs {
            violations.push(PairViolation { pair: i, lhs, rhs });
        }
    }
    HajlaszReport { c, checked: pairs.len(), violations, min_c }
}

/// Violation counts for each candidate constant.
pub fn hajlasz_sweep(
    f: &dyn Fn(&[f64]) -> f64,
    m: &GridField,
    pairs: &[(Vec<f64>, Vec<f64>)],
    constants: &[f64],
) -> Vec<(f64, usize)> {
    constants
        .iter()
        .map(|&c| (c, hajlasz_pair_check(f, m, pairs, c).violations.len()))
        .collect()
}
