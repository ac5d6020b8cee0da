//! The assembled function `f = Σ_n Σ_{Q ∈ Q_n} φ_Q`.
//!
//! Each selected cube `Q` of level `n < n_max` carries a capacity bump `φ_Q`
//! centered at its center, with plateau `2^{-k_n}`, support radius
//! `2^{-l_n - 1}` (inside `I_Q`) and Lipschitz-field norm at most `ε_n`.
//! Since the supports sit in pairwise disjoint inner cubes, `f` equals `φ_Q`
//! on `I_Q` and vanishes off `⋃ I_Q`.
//!
//! Points of the residual set are addressed by chains. Along a chain the
//! probes follow the proof directly: balls of radius `2^{-l_n}` around `x`
//! only see bumps of level `> n`, which gives `lip f(x) = 0`, while the
//! center `a` of the level-`n` cube and a boundary point `b` give difference
//! quotients of order `2^{j_n/3}`, which gives `Lip f(x) = ∞`.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::capacity::{make_bump, radius_of, Bump, BumpSpec, CapacityError};
use crate::cubetree::geometry::chain_center;
use crate::cubetree::{inner_cube, locate, Classification, CubeChain, CubeError, DyadicCube, ParamSequence};
use crate::lorentz::{LorentzError, LorentzIndex, RadialProfile};
use crate::numeric::dyadic::dist2;
use crate::numeric::{Dyadic, LogScale, Scaled};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SharpError {
    #[error(transparent)]
    Cube(#[from] CubeError),
    #[error(transparent)]
    Capacity(#[from] CapacityError),
    #[error(transparent)]
    Lorentz(#[from] LorentzError),
    #[error("not an 𝓘-candidate: {0}")]
    NotCandidate(String),
    #[error("unsupported parameters: {0}")]
    Unsupported(String),
    #[error("witness failed revalidation: {0}")]
    Witness(String),
}

/// A value with an absolute error bound.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertifiedValue {
    pub value: Scaled,
    pub uncertainty: Scaled,
}

impl CertifiedValue {
    pub fn exact(value: Scaled) -> Self {
        CertifiedValue { value, uncertainty: Scaled::zero() }
    }

    pub fn is_exact(&self) -> bool {
        self.uncertainty.is_zero()
    }

    /// Lower end, clamped at zero since `f >= 0`.
    pub fn lo(&self) -> Scaled {
        self.value.saturating_sub(self.uncertainty)
    }

    pub fn hi(&self) -> Scaled {
        add_scaled(self.value, self.uncertainty)
    }
}

pub(crate) fn add_scaled(a: Scaled, b: Scaled) -> Scaled {
    if a.is_zero() {
        return b;
    }
    if b.is_zero() {
        return a;
    }
    let (big, small) = if a >= b { (a, b) } else { (b, a) };
    let shift = small.exponent - big.exponent;
    let m = big.mantissa + crate::numeric::scaled::ldexp(small.mantissa, shift);
    // round the sum up by one part in 2^50
    Scaled::from_f64(m * (1.0 + 2f64.powi(-50))).mul_pow2(big.exponent)
}

fn max_scaled(a: Scaled, b: Scaled) -> Scaled {
    if a >= b {
        a
    } else {
        b
    }
}

/// Euclidean distance enclosure from the exact squared distance.
fn dist_bounds(x: &[Dyadic], y: &[Dyadic]) -> (Scaled, Scaled) {
    let d = dist2(x, y).to_scaled().sqrt();
    (d.deflate(1e-14), d.inflate(1e-14))
}

pub struct SharpExample {
    params: ParamSequence,
    profile: RadialProfile,
    index: LorentzIndex,
    shapes: Vec<OnceLock<Result<Arc<Bump>, SharpError>>>,
    cache: RwLock<HashMap<CubeChain, Arc<Bump>>>,
}

impl std::fmt::Debug for SharpExample {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SharpExample")
            .field("params", &self.params)
            .field("profile", &self.profile)
            .field("index", &self.index)
            .finish_non_exhaustive()
    }
}

impl SharpExample {
    /// `S = L^{N, q_s}` with `1 < q_s <= N`.
    pub fn new(params: ParamSequence, profile: RadialProfile, q_s: f64) -> Result<Self, SharpError> {
        let index = LorentzIndex::new(params.dim as f64, q_s)?;
        if q_s <= 1.0 {
            return Err(SharpError::Unsupported("q_S must exceed 1".into()));
        }
        profile.validate()?;
        for n in 0..params.n_max() {
            if params.l[n] > 1000 || params.k[n] > 1000 {
                return Err(SharpError::Unsupported(format!("level {n}: l or k beyond 1000")));
            }
        }
        let shapes = (0..params.n_max()).map(|_| OnceLock::new()).collect();
        Ok(SharpExample { params, profile, index, shapes, cache: RwLock::new(HashMap::new()) })
    }

    /// Default strict parameters, log profile, `q_S = 2`.
    pub fn default_strict(dim: u32) -> Result<Self, SharpError> {
        Self::new(ParamSequence::default_strict(dim), RadialProfile::log_critical(dim), 2.0)
    }

    pub fn params(&self) -> &ParamSequence {
        &self.params
    }

    pub fn index(&self) -> LorentzIndex {
        self.index
    }

    pub fn height(&self, n: usize) -> Scaled {
        Scaled::pow2(-(self.params.k[n] as i64))
    }

    /// The level-`n` bump centered at the origin; built once.
    pub fn level_bump(&self, n: usize) -> Result<Arc<Bump>, SharpError> {
        self.shapes[n]
            .get_or_init(|| {
                let p = &self.params;
                let budget = p.eps[n].to_f64().unwrap_or(0.0);
                if !(budget > 0.0) {
                    return Err(SharpError::Unsupported(format!("budget ε_{n} = {} outside f64 range", p.eps[n])));
                }
                let spec = BumpSpec {
                    center: vec![Dyadic::zero(); p.dim as usize],
                    eps: 2f64.powi(-(p.l[n] as i32)),
                    tau: 2f64.powi(-(p.k[n] as i32)),
                    profile: self.profile.clone(),
                    index: self.index,
                    norm_budget: budget,
                };
                make_bump(spec).map(Arc::new).map_err(SharpError::from)
            })
            .clone()
    }

    /// `φ_Q` for the cube addressed by `chain`.
    pub fn bump(&self, chain: &CubeChain) -> Result<Arc<Bump>, SharpError> {
        if let Some(b) = self.cache.read().expect("bump cache poisoned").get(chain) {
            return Ok(b.clone());
        }
        let n = chain.depth();
        if n >= self.params.n_max() {
            return Err(SharpError::Unsupported(format!("no bumps at level {n}")));
        }
        let template = self.level_bump(n)?;
        let b = Arc::new(template.recentered(chain_center(chain, &self.params)));
        let mut cache = self.cache.write().expect("bump cache poisoned");
        Ok(cache.entry(chain.clone()).or_insert(b).clone())
    }

    pub fn cached_bumps(&self) -> usize {
        self.cache.read().map(|c| c.len()).unwrap_or(0)
    }

    fn bump_value(&self, chain: &CubeChain, x: &[Dyadic]) -> Result<Scaled, SharpError> {
        let b = self.bump(chain)?;
        let frac = b.shape_at_radius(&radius_of(b.center(), x));
        Ok(if frac == 0.0 { Scaled::zero() } else { self.height(chain.depth()).mul_f64(frac) })
    }
}

/// `f(x)` with the uncertainty left by the depth cap.
pub fn eval_f(ex: &SharpExample, x: &[Dyadic], max_depth: usize) -> Result<CertifiedValue, SharpError> {
    let loc = locate(x, &ex.params, max_depth)?;
    Ok(match loc.class {
        Classification::InInner { .. } => CertifiedValue::exact(ex.bump_value(&loc.chain, x)?),
        Classification::Escaped { .. } => CertifiedValue::exact(Scaled::zero()),
        Classification::Deep { depth } => CertifiedValue { value: Scaled::zero(), uncertainty: ex.height(depth + 1) },
    })
}

/// Point standing for the chain: the center of its deepest cube, classified
/// one level above.
pub fn probe_point(ex: &SharpExample, chain: &CubeChain) -> Result<(Vec<Dyadic>, usize), SharpError> {
    chain.validate(&ex.params)?;
    if chain.depth() == 0 {
        return Err(SharpError::NotCandidate("empty chain".into()));
    }
    Ok((chain_center(chain, &ex.params), chain.depth() - 1))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LipProbeRow {
    pub level: usize,
    /// The probe radius is `2^{-radius_exp}`.
    pub radius_exp: u64,
    /// Certified bound on `sup_{|y-x| < r} |f(y) - f(x)| / r`.
    pub bound: Scaled,
    /// Exact `ℓ∞` gaps of the next cube to `I_Q` and to `∂Q`, over `r`.
    pub gap_to_inner: Dyadic,
    pub gap_to_boundary: Dyadic,
    /// Upper end of [`sup_on_ball`] at this radius, divided by `r`.
    pub sup_ratio_upper: Option<Scaled>,
}

/// Upper bounds on difference quotients at the radii `2^{-l_n}`, one row per
/// level the chain passes through.
pub fn lip_probe(ex: &SharpExample, chain: &CubeChain, depth: usize) -> Result<Vec<LipProbeRow>, SharpError> {
    let p = &ex.params;
    let (x, classify_depth) = probe_point(ex, chain)?;
    let loc = locate(&x, p, classify_depth)?;
    if loc.class != (Classification::Deep { depth: classify_depth }) || &loc.chain != chain {
        return Err(SharpError::NotCandidate(format!("{:?} at depth {classify_depth}", loc.class)));
    }
    let cubes = chain.cubes(p);
    let mut rows = Vec::new();
    for n in 0..=depth.min(chain.depth() - 1) {
        let q = &cubes[n];
        let next = cubes[n + 1].bounds(p);
        let r = Dyadic::pow2(-(p.l[n] as i64));
        let gap_inner = inner_cube(q, p).dist_inf(&next);
        let gap_bdry = q.bounds(p).depth_of(&next);
        if gap_inner < r || gap_bdry < r {
            return Err(SharpError::NotCandidate(format!("gap below 2^-l_{n} at level {n}")));
        }
        // B(x, r) misses I_Q and stays in Q, so only levels > n are seen
        let bound = Scaled::pow2(p.l[n] as i64 - p.k[n + 1] as i64);
        let sup_ratio_upper = sup_on_ball(ex, &x, &r, (n + 1).min(p.n_max() - 1), 4096)
            .ok()
            .map(|s| s.upper.mul_pow2(p.l[n] as i64));
        rows.push(LipProbeRow {
            level: n,
            radius_exp: p.l[n],
            bound,
            gap_to_inner: gap_inner.mul_pow2(p.l[n] as i64),
            gap_to_boundary: gap_bdry.mul_pow2(p.l[n] as i64),
            sup_ratio_upper,
        });
    }
    Ok(rows)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessKind {
    /// Center of the level-`n` cube.
    Center,
    /// Ray from the center through `x`, met with the cube boundary.
    Boundary,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub level: usize,
    pub kind: WitnessKind,
    pub point: Vec<Dyadic>,
    pub f_x: CertifiedValue,
    pub f_y: CertifiedValue,
    pub dist_upper: Scaled,
    /// Certified lower bound on `|f(x) - f(y)| / |x - y|`.
    pub ratio_lower: Scaled,
    /// `2^{j_n - k_n} / (2 √N)`.
    pub target: Scaled,
}

impl Witness {
    pub fn meets_target(&self) -> bool {
        self.ratio_lower >= self.target
    }
}

/// The ray from `a` through `x` met with `∂Q`, snapped to the `2^{-grid}`
/// lattice. The coordinate of largest displacement lands exactly on the face.
fn boundary_point(a: &[Dyadic], x: &[Dyadic], half_exp: u64, grid: u64) -> Vec<Dyadic> {
    let d: Vec<Dyadic> = x.iter().zip(a).map(|(xi, ai)| xi - ai).collect();
    let (imax, dmax) = d
        .iter()
        .enumerate()
        .max_by(|(_, u), (_, v)| u.abs().cmp(&v.abs()))
        .map(|(i, v)| (i, v.abs()))
        .expect("nonempty point");
    let h = Dyadic::pow2(-(half_exp as i64));
    let t = h.to_rational() / dmax.to_rational();
    d.iter()
        .zip(a)
        .enumerate()
        .map(|(i, (di, ai))| {
            if i == imax {
                let s = if di.is_negative() { -&h } else { h.clone() };
                ai + &s
            } else {
                let target = ai.to_rational() + di.to_rational() * &t;
                let scaled = target * BigRational::from_integer(BigInt::one() << grid);
                let rounded = scaled.round().to_integer();
                Dyadic::new(rounded, grid as i64)
            }
        })
        .collect()
}

/// Difference-quotient witness at level `n` for the point of `chain`.
pub fn nondiff_witness(ex: &SharpExample, chain: &CubeChain, n: usize) -> Result<Witness, SharpError> {
    let p = &ex.params;
    let (x, classify_depth) = probe_point(ex, chain)?;
    if n + 1 > chain.depth() {
        return Err(SharpError::NotCandidate(format!("chain of depth {} does not reach level {}", chain.depth(), n + 1)));
    }
    let f_x = eval_f(ex, &x, classify_depth)?;
    let q = &chain.cubes(p)[n];
    let a = q.center.clone();
    let b = boundary_point(&a, &x, p.j[n], p.j[n + 1]);

    // both reference values must be resolved exactly
    let f_a = eval_f(ex, &a, n)?;
    let f_b = eval_f(ex, &b, n)?;
    if !f_a.is_exact() || !f_b.is_exact() {
        return Err(SharpError::Witness("reference value not resolved".into()));
    }
    if f_a.value != ex.height(n) || !f_b.value.is_zero() {
        return Err(SharpError::Witness(format!("f(a) = {}, f(b) = {}", f_a.value, f_b.value)));
    }

    let (_, da) = dist_bounds(&x, &a);
    let (_, db) = dist_bounds(&x, &b);
    let ra = f_a.lo().saturating_sub(f_x.hi()).div(da).deflate(1e-14);
    let rb = if db.is_zero() { Scaled::zero() } else { f_x.lo().div(db).deflate(1e-14) };
    let target = Scaled::pow2(p.j[n] as i64 - p.k[n] as i64 - 1).div(Scaled::from_f64((p.dim as f64).sqrt()));
    let (kind, point, f_y, dist_upper, ratio_lower) = if ra >= rb {
        (WitnessKind::Center, a, f_a, da, ra)
    } else {
        (WitnessKind::Boundary, b, f_b, db, rb)
    };
    Ok(Witness { level: n, kind, point, f_x, f_y, dist_upper, ratio_lower, target })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BudgetReport {
    /// `card(Q_n) * ε_n`, exact.
    pub per_level: Vec<String>,
    pub total: String,
    pub total_f64: f64,
    pub within_two: bool,
    /// `Σ card(Q_n) ‖lip φ_Q‖` from the certified norms of the built bumps.
    pub realized: Option<Scaled>,
}

fn budget_terms(p: &ParamSequence) -> Vec<BigRational> {
    (0..p.n_max())
        .map(|n| BigRational::from_integer(p.card(n)) * &p.eps[n])
        .collect()
}

/// `Σ_n card(Q_n) ε_n`, bounding `‖lip f‖_S` by the triangle inequality over
/// the bump decomposition.
pub fn lip_field_norm_budget(ex: &SharpExample) -> BudgetReport {
    let p = &ex.params;
    let terms = budget_terms(p);
    let total: BigRational = terms.iter().fold(BigRational::zero(), |acc, t| acc + t);
    let two = BigRational::from_integer(2.into());
    let realized = (0..p.n_max())
        .map(|n| {
            let b = ex.level_bump(n).ok()?;
            let norm = b.lip_norm.upper()?;
            let card = p.card(n);
            let card_scaled = Scaled::from_f64(card.to_f64()?);
            Some(card_scaled.mul_f64(norm))
        })
        .try_fold(Scaled::zero(), |acc, t| t.map(|t| add_scaled(acc, t)));
    BudgetReport {
        per_level: terms.iter().map(|t| t.to_string()).collect(),
        total: total.to_string(),
        total_f64: total.to_f64().unwrap_or(f64::NAN),
        within_two: total <= two,
        realized,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SupBound {
    pub lower: Scaled,
    pub upper: Scaled,
    pub f_x: CertifiedValue,
    /// Every cube meeting the ball was examined down to the depth cap.
    pub resolved: bool,
}

/// Two-sided bound on `sup_{y ∈ B(x, r)} |f(y) - f(x)|` (open Euclidean
/// ball). Cubes of level `<= max_depth` meeting the ball are examined; a
/// level whose candidate children exceed `child_budget` is bounded by its
/// height instead.
pub fn sup_on_ball(
    ex: &SharpExample,
    x: &[Dyadic],
    r: &Dyadic,
    max_depth: usize,
    child_budget: usize,
) -> Result<SupBound, SharpError> {
    let p = &ex.params;
    if r.is_negative() || r.is_zero() {
        return Err(SharpError::Unsupported("radius must be positive".into()));
    }
    let max_depth = max_depth.min(p.n_max() - 1);
    let f_x = eval_f(ex, x, max_depth)?;
    let r2 = r * r;
    let r_scaled = r.to_scaled();

    let mut sup_lo = Scaled::zero();
    let mut sup_hi = Scaled::zero();
    let mut resolved = true;
    let mut stack = vec![CubeChain::default()];
    while let Some(chain) = stack.pop() {
        let n = chain.depth();
        let q = chain.cube(p);
        // bump of this cube
        let b = ex.bump(&chain)?;
        let c = &q.center;
        let d2c = dist2(x, c);
        let h = ex.height(n);
        if d2c < r2 {
            sup_lo = max_scaled(sup_lo, h);
        }
        let (d_lo, _) = dist_bounds(x, c);
        let gap = d_lo.saturating_sub(r_scaled.inflate(1e-14));
        let frac = b.shape_at_radius(&LogScale::from_ln(gap.log2() * std::f64::consts::LN_2));
        if frac > 0.0 {
            sup_hi = max_scaled(sup_hi, h.mul_f64(frac).inflate(1e-12));
        }
        if n + 1 > p.n_max() {
            continue;
        }
        // children meeting the ball
        let rule = p.rule(n);
        let e = p.j[n + 1] as i64;
        let unit = Dyadic::pow2(-e);
        let mut ranges = Vec::with_capacity(x.len());
        let mut total: f64 = 1.0;
        for (xi, ci) in x.iter().zip(c) {
            let lo = (&(&(xi - ci) - r) - &unit).floor_on_grid(e).max(-&rule.grid_abs);
            let hi = (&(&(xi - ci) + r) + &unit).floor_on_grid(e).min(rule.grid_abs.clone());
            let lo_odd = if lo.bit(0) { lo } else { lo + 1u32 };
            let count = if hi >= lo_odd { ((&hi - &lo_odd) / 2u32 + 1u32).to_f64().unwrap_or(f64::INFINITY) } else { 0.0 };
            total *= count;
            ranges.push((lo_odd, hi));
        }
        if total == 0.0 {
            continue;
        }
        if n == max_depth || total > child_budget as f64 {
            // level n+1 and below: height bound only
            if n + 1 <= p.n_max() && any_selected_child_meets(&q, &ranges, &rule, x, &r2, p, child_budget) {
                sup_hi = max_scaled(sup_hi, ex.height(n + 1));
                resolved = resolved && n == max_depth;
            }
            continue;
        }
        for off in odd_product(&ranges) {
            if !rule.selects(&off) {
                continue;
            }
            let child = q.child(&off, p);
            if child.bounds(p).dist2_to_point(x) < r2 {
                let mut next = chain.clone();
                next.push(off);
                if next.depth() < p.n_max() {
                    stack.push(next);
                } else {
                    sup_hi = max_scaled(sup_hi, ex.height(next.depth()));
                }
            }
        }
    }
    let upper = max_scaled(sup_hi.saturating_sub(f_x.lo()), f_x.hi()).inflate(1e-12);
    let lower = sup_lo.saturating_sub(f_x.hi());
    Ok(SupBound { lower, upper, f_x, resolved })
}

/// Whether some selected child within the index ranges meets the ball;
/// assumes yes when the ranges are too large to scan.
fn any_selected_child_meets(
    q: &DyadicCube,
    ranges: &[(BigInt, BigInt)],
    rule: &crate::cubetree::params::ChildRule,
    x: &[Dyadic],
    r2: &Dyadic,
    p: &ParamSequence,
    budget: usize,
) -> bool {
    let total: f64 = ranges
        .iter()
        .map(|(lo, hi)| if hi >= lo { ((hi - lo) / 2u32 + 1u32).to_f64().unwrap_or(f64::INFINITY) } else { 0.0 })
        .product();
    if total > budget as f64 {
        return true;
    }
    odd_product(ranges).any(|off| rule.selects(&off) && q.child(&off, p).bounds(p).dist2_to_point(x) < *r2)
}

fn odd_product(ranges: &[(BigInt, BigInt)]) -> impl Iterator<Item = Vec<BigInt>> + '_ {
    let mut cur: Option<Vec<BigInt>> = if ranges.iter().all(|(lo, hi)| lo <= hi) {
        Some(ranges.iter().map(|(lo, _)| lo.clone()).collect())
    } else {
        None
    };
    std::iter::from_fn(move || {
        let out = cur.clone()?;
        let mut next = out.clone();
        let mut d = 0;
        loop {
            if d == next.len() {
                cur = None;
                break;
            }
            next[d] += 2;
            if next[d] <= ranges[d].1 {
                cur = Some(next);
                break;
            }
            next[d] = ranges[d].0.clone();
            d += 1;
        }
        Some(out)
    })
}

/// Random chains to `depth`, uniform among selected offsets at each level.
pub fn random_chains<R: Rng + ?Sized>(ex: &SharpExample, count: usize, depth: usize, rng: &mut R) -> Vec<CubeChain> {
    (0..count).map(|_| CubeChain::random(&ex.params, depth, rng)).collect()
}

/// Build the bump of every level.
pub fn warm_up(ex: &SharpExample) -> Result<(), SharpError> {
    (0..ex.params.n_max()).try_for_each(|n| ex.level_bump(n).map(|_| ()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn d(x: f64) -> Dyadic {
        Dyadic::from_f64(x).unwrap()
    }

    #[test]
    fn values_at_reference_points() {
        let ex = SharpExample::default_strict(2).unwrap();
        let origin = eval_f(&ex, &[d(0.0), d(0.0)], 2).unwrap();
        assert!(origin.is_exact());
        assert_eq!(origin.value, Scaled::pow2(0));
        let edge = eval_f(&ex, &[d(1.0), d(0.25)], 2).unwrap();
        assert!(edge.is_exact() && edge.value.is_zero());
        let chain = CubeChain::canonical(ex.params(), 1);
        let c = chain_center(&chain, ex.params());
        let v = eval_f(&ex, &c, 2).unwrap();
        assert_eq!(v.value, Scaled::pow2(-6));
    }

    #[test]
    fn evaluation_is_deterministic() {
        let ex = SharpExample::default_strict(2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for chain in random_chains(&ex, 5, 3, &mut rng) {
            let (x, depth) = probe_point(&ex, &chain).unwrap();
            assert_eq!(eval_f(&ex, &x, depth).unwrap(), eval_f(&ex, &x, depth).unwrap());
        }
    }

    #[test]
    fn sup_grows_with_radius() {
        let ex = SharpExample::default_strict(2).unwrap();
        let x = [d(0.3), d(-0.2)];
        let small = sup_on_ball(&ex, &x, &Dyadic::pow2(-6), 1, 4096).unwrap();
        let large = sup_on_ball(&ex, &x, &Dyadic::pow2(-1), 1, 4096).unwrap();
        assert!(small.lower <= small.upper && large.lower <= large.upper);
        assert!(small.lower <= large.upper);
        // the large ball reaches the plateau at the origin
        assert!(large.lower >= Scaled::from_f64(0.5));
    }

    #[test]
    fn empty_chain_is_not_a_candidate() {
        let ex = SharpExample::default_strict(2).unwrap();
        assert!(matches!(probe_point(&ex, &CubeChain::default()), Err(SharpError::NotCandidate(_))));
    }

    #[test]
    fn budget_is_seven_quarters() {
        let ex = SharpExample::default_strict(2).unwrap();
        let b = lip_field_norm_budget(&ex);
        assert_eq!(b.total, "7/4");
        assert!(b.within_two);
    }
}
