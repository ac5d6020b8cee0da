//! Exact cube geometry: cubes, inner cubes, chains and point location.

use num_bigint::{BigInt, RandBigInt};
use num_integer::Integer;
use num_traits::Signed;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::params::ParamSequence;
use super::CubeError;
use crate::numeric::Dyadic;

/// Closed axis-parallel box `[lo, hi]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DyadicBox {
    pub lo: Vec<Dyadic>,
    pub hi: Vec<Dyadic>,
}

impl DyadicBox {
    pub fn cube(center: &[Dyadic], half_side_exp: u64) -> Self {
        let h = Dyadic::pow2(-(half_side_exp as i64));
        DyadicBox {
            lo: center.iter().map(|c| c - &h).collect(),
            hi: center.iter().map(|c| c + &h).collect(),
        }
    }

    pub fn contains_closed(&self, x: &[Dyadic]) -> bool {
        x.iter().zip(self.lo.iter().zip(&self.hi)).all(|(v, (a, b))| a <= v && v <= b)
    }

    pub fn contains_interior(&self, x: &[Dyadic]) -> bool {
        x.iter().zip(self.lo.iter().zip(&self.hi)).all(|(v, (a, b))| a < v && v < b)
    }

    /// `ℓ∞` distance between two boxes, zero when they meet.
    pub fn dist_inf(&self, other: &DyadicBox) -> Dyadic {
        let mut best = Dyadic::zero();
        for i in 0..self.lo.len() {
            let gap = (&other.lo[i] - &self.hi[i]).max(&self.lo[i] - &other.hi[i]);
            best = best.max(gap);
        }
        best
    }

    /// `ℓ∞` distance from a box inside `self` to the boundary of `self`.
    pub fn depth_of(&self, inner: &DyadicBox) -> Dyadic {
        (0..self.lo.len())
            .flat_map(|i| [&inner.lo[i] - &self.lo[i], &self.hi[i] - &inner.hi[i]])
            .min()
            .unwrap_or_default()
    }

    /// Interiors intersect.
    pub fn overlaps(&self, other: &DyadicBox) -> bool {
        (0..self.lo.len()).all(|i| self.lo[i] < other.hi[i] && other.lo[i] < self.hi[i])
    }

    /// Squared Euclidean distance from `x` to the box.
    pub fn dist2_to_point(&self, x: &[Dyadic]) -> Dyadic {
        let mut acc = Dyadic::zero();
        for (i, v) in x.iter().enumerate() {
            let d = if v < &self.lo[i] {
                &self.lo[i] - v
            } else if v > &self.hi[i] {
                v - &self.hi[i]
            } else {
                continue;
            };
            acc = &acc + &(&d * &d);
        }
        acc
    }
}

/// Selected cube of level `n`: half-side `2^{-j_n}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DyadicCube {
    pub level: usize,
    pub center: Vec<Dyadic>,
}

impl DyadicCube {
    pub fn root(dim: u32) -> Self {
        DyadicCube { level: 0, center: vec![Dyadic::zero(); dim as usize] }
    }

    pub fn half_side_exp(&self, p: &ParamSequence) -> u64 {
        p.j[self.level]
    }

    pub fn bounds(&self, p: &ParamSequence) -> DyadicBox {
        DyadicBox::cube(&self.center, self.half_side_exp(p))
    }

    /// Child at `offset` (units of `2^{-j_{n+1}}`).
    pub fn child(&self, offset: &[BigInt], p: &ParamSequence) -> DyadicCube {
        let e = p.j[self.level + 1] as i64;
        let center = self
            .center
            .iter()
            .zip(offset)
            .map(|(c, o)| c + &Dyadic::new(o.clone(), e))
            .collect();
        DyadicCube { level: self.level + 1, center }
    }
}

/// `I_Q`: closed cube of half-side `2^{-l_n}` concentric with `Q`.
pub fn inner_cube(q: &DyadicCube, p: &ParamSequence) -> DyadicBox {
    DyadicBox::cube(&q.center, p.l[q.level])
}

pub fn is_selected_child(parent: &DyadicCube, offset: &[BigInt], p: &ParamSequence) -> bool {
    let rule = p.rule(parent.level);
    let inside = offset.iter().all(|c| c.abs() <= rule.grid_abs);
    inside && rule.selects(offset)
}

/// `card(Q(Q))` for a level-`n` cube, `A^N - B^N`.
pub fn children_count(n: usize, p: &ParamSequence) -> BigInt {
    p.rule(n).count(p.dim)
}

/// All selected offsets at level `n`, by enumeration of the subcube grid.
/// Only sensible at relaxed scales.
pub fn selected_offsets(n: usize, p: &ParamSequence) -> Vec<Vec<BigInt>> {
    let rule = p.rule(n);
    let g: i64 = (&rule.grid_abs).try_into().expect("grid too large to enumerate");
    let axis: Vec<i64> = (-g..=g).step_by(2).collect();
    let mut out = Vec::new();
    let mut idx = vec![0usize; p.dim as usize];
    loop {
        let off: Vec<BigInt> = idx.iter().map(|&i| BigInt::from(axis[i])).collect();
        if rule.selects(&off) {
            out.push(off);
        }
        let mut d = 0;
        loop {
            if d == idx.len() {
                return out;
            }
            idx[d] += 1;
            if idx[d] < axis.len() {
                break;
            }
            idx[d] = 0;
            d += 1;
        }
    }
}

/// Canonical address: offsets from each parent center, root first.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CubeChain {
    #[serde(with = "offsets_as_strings")]
    pub offsets: Vec<Vec<BigInt>>,
}

mod offsets_as_strings {
    use num_bigint::BigInt;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[Vec<BigInt>], s: S) -> Result<S::Ok, S::Error> {
        let strs: Vec<Vec<String>> = v.iter().map(|o| o.iter().map(|c| c.to_string()).collect()).collect();
        serde::Serialize::serialize(&strs, s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<BigInt>>, D::Error> {
        let strs: Vec<Vec<String>> = Vec::deserialize(d)?;
        strs.into_iter()
            .map(|o| o.into_iter().map(|c| c.parse().map_err(D::Error::custom)).collect())
            .collect()
    }
}

impl CubeChain {
    pub fn depth(&self) -> usize {
        self.offsets.len()
    }

    pub fn prefix(&self, len: usize) -> CubeChain {
        CubeChain { offsets: self.offsets[..len].to_vec() }
    }

    pub fn push(&mut self, offset: Vec<BigInt>) {
        self.offsets.push(offset);
    }

    /// Check every offset against the selection rule.
    pub fn validate(&self, p: &ParamSequence) -> Result<(), CubeError> {
        if self.depth() > p.n_max() {
            return Err(CubeError::InvalidChain(format!(
                "depth {} exceeds n_max = {}",
                self.depth(),
                p.n_max()
            )));
        }
        for (n, off) in self.offsets.iter().enumerate() {
            if off.len() != p.dim as usize {
                return Err(CubeError::InvalidChain(format!("offset {n} has {} coordinates", off.len())));
            }
            let rule = p.rule(n);
            if !(off.iter().all(|c| c.abs() <= rule.grid_abs) && rule.selects(off)) {
                return Err(CubeError::InvalidChain(format!("offset {n} violates the selection rule")));
            }
        }
        Ok(())
    }

    /// Cubes along the chain, root first.
    pub fn cubes(&self, p: &ParamSequence) -> Vec<DyadicCube> {
        let mut q = DyadicCube::root(p.dim);
        let mut out = vec![q.clone()];
        for off in &self.offsets {
            q = q.child(off, p);
            out.push(q.clone());
        }
        out
    }

    pub fn cube(&self, p: &ParamSequence) -> DyadicCube {
        self.cubes(p).pop().expect("root always present")
    }

    /// Compact textual id: levels separated by `/`, coordinates by `,`.
    pub fn id(&self) -> String {
        if self.offsets.is_empty() {
            return "root".into();
        }
        self.offsets
            .iter()
            .map(|o| o.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(","))
            .collect::<Vec<_>>()
            .join("/")
    }

    pub fn parse_id(s: &str) -> Result<Self, CubeError> {
        let s = s.trim();
        if s.is_empty() || s == "root" {
            return Ok(CubeChain::default());
        }
        let offsets = s
            .split('/')
            .map(|lvl| {
                lvl.split(',')
                    .map(|c| c.trim().parse::<BigInt>().map_err(|e| CubeError::InvalidChain(format!("{c:?}: {e}"))))
                    .collect()
            })
            .collect::<Result<_, _>>()?;
        Ok(CubeChain { offsets })
    }

    /// First selected child at every level down to `depth`, in lexicographic
    /// order of offsets (most negative first).
    pub fn canonical(p: &ParamSequence, depth: usize) -> CubeChain {
        let mut chain = CubeChain::default();
        for n in 0..depth.min(p.n_max()) {
            let rule = p.rule(n);
            chain.push(vec![-&rule.max_abs; p.dim as usize]);
        }
        chain
    }

    /// Uniformly random selected offsets by rejection, level by level.
    pub fn random<R: Rng + ?Sized>(p: &ParamSequence, depth: usize, rng: &mut R) -> CubeChain {
        let mut chain = CubeChain::default();
        for n in 0..depth.min(p.n_max()) {
            let rule = p.rule(n);
            // odd c = 2i + 1 with i in [-(g+1)/2, (g-1)/2]
            let lo: BigInt = -(&rule.grid_abs + BigInt::from(1)) / 2;
            let hi: BigInt = (&rule.grid_abs - BigInt::from(1)) / 2 + 1;
            loop {
                let off: Vec<BigInt> = (0..p.dim)
                    .map(|_| rng.gen_bigint_range(&lo, &hi) * 2 + 1)
                    .collect();
                if rule.selects(&off) {
                    chain.push(off);
                    break;
                }
            }
        }
        chain
    }
}


#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Classification {
    /// `x` lies in the closed inner cube of the last cube of the chain.
    InInner { level: usize },
    /// `x` is in the level-`level` cube but in no selected child's interior
    /// and not in its inner cube.
    Escaped { level: usize },
    /// `x` is in the interior of the selected level-`depth + 1` cube closing
    /// the chain; deeper structure was not examined.
    Deep { depth: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Location {
    pub chain: CubeChain,
    pub class: Classification,
    /// The requested depth exceeded `n_max - 1` and was lowered.
    pub capped: bool,
}

/// Follow `x` down the selected cubes, classifying at levels `0..=max_depth`.
pub fn locate(x: &[Dyadic], p: &ParamSequence, max_depth: usize) -> Result<Location, CubeError> {
    if x.len() != p.dim as usize {
        return Err(CubeError::InvalidPoint(format!("expected {} coordinates, got {}", p.dim, x.len())));
    }
    let root = DyadicCube::root(p.dim);
    if !root.bounds(p).contains_closed(x) {
        return Err(CubeError::InvalidPoint("point outside [-1, 1]^N".into()));
    }
    let capped = max_depth > p.n_max() - 1;
    let max_depth = max_depth.min(p.n_max() - 1);
    let mut chain = CubeChain::default();
    let mut q = root;
    loop {
        let n = q.level;
        if inner_cube(&q, p).contains_closed(x) {
            return Ok(Location { chain, class: Classification::InInner { level: n }, capped });
        }
        let e = p.j[n + 1] as i64;
        let mut offset = Vec::with_capacity(x.len());
        for (v, c) in x.iter().zip(&q.center) {
            // position in units of 2^{-j_{n+1}}; even integers lie on child faces
            let u = (v - c).mul_pow2(e);
            match u.to_grid(0) {
                Some(i) if i.is_even() => {
                    return Ok(Location { chain, class: Classification::Escaped { level: n }, capped })
                }
                _ => {}
            }
            let f = u.floor_on_grid(0);
            offset.push(if f.is_odd() { f } else { f + 1 });
        }
        if !is_selected_child(&q, &offset, p) {
            return Ok(Location { chain, class: Classification::Escaped { level: n }, capped });
        }
        q = q.child(&offset, p);
        chain.push(offset);
        if n == max_depth {
            return Ok(Location { chain, class: Classification::Deep { depth: n }, capped });
        }
    }
}

/// Exact center of the cube addressed by `chain`.
pub fn chain_center(chain: &CubeChain, p: &ParamSequence) -> Vec<Dyadic> {
    chain.cube(p).center
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;

    fn relaxed() -> ParamSequence {
        ParamSequence::relaxed(2, vec![0, 4, 9], Some(vec![2, 6])).unwrap()
    }

    #[test]
    fn selection_examples() {
        let p = ParamSequence::default_strict(2);
        let root = DyadicCube::root(2);
        let zero = vec![BigInt::zero(); 2];
        assert!(!is_selected_child(&root, &zero, &p));
        let corner = vec![BigInt::from(511); 2];
        assert!(!is_selected_child(&root, &corner, &p));
        let rule = p.rule(0);
        // ‖c‖ exactly on the closed lower bound
        let on_lower = vec![rule.min_abs.clone(), BigInt::from(1)];
        assert!(is_selected_child(&root, &on_lower, &p));
        assert_eq!(children_count(0, &p), BigInt::from(226304));
    }

    #[test]
    fn inner_cube_of_root() {
        let p = ParamSequence::default_strict(2);
        let ic = inner_cube(&DyadicCube::root(2), &p);
        assert_eq!(ic.lo, vec![Dyadic::new((-1).into(), 4); 2]);
        assert_eq!(ic.hi, vec![Dyadic::new(1.into(), 4); 2]);
    }

    #[test]
    fn locate_examples() {
        let p = ParamSequence::default_strict(2);
        let origin = vec![Dyadic::zero(); 2];
        let loc = locate(&origin, &p, 2).unwrap();
        assert_eq!(loc.class, Classification::InInner { level: 0 });
        assert!(loc.chain.offsets.is_empty());

        let chain = CubeChain::canonical(&p, 1);
        let c = chain_center(&chain, &p);
        let loc = locate(&c, &p, 2).unwrap();
        assert_eq!(loc.chain, chain);
        assert_eq!(loc.class, Classification::InInner { level: 1 });

        let edge = vec![Dyadic::one(), Dyadic::zero()];
        assert_eq!(locate(&edge, &p, 2).unwrap().class, Classification::Escaped { level: 0 });
        let loc = locate(&c, &p, 0).unwrap();
        assert_eq!(loc.class, Classification::Deep { depth: 0 });
        assert!(locate(&origin, &p, 7).unwrap().capped);
        assert!(locate(&[Dyadic::from_int(2), Dyadic::zero()], &p, 1).is_err());
    }

    #[test]
    fn enumeration_matches_count() {
        let p = relaxed();
        for n in 0..2 {
            assert_eq!(BigInt::from(selected_offsets(n, &p).len()), children_count(n, &p));
        }
    }

    #[test]
    fn chain_ids_roundtrip() {
        let p = ParamSequence::default_strict(2);
        let mut rng = rand::rngs::mock::StepRng::new(7, 0x9E37_79B9_7F4A_7C15);
        let c = CubeChain::random(&p, 3, &mut rng);
        c.validate(&p).unwrap();
        assert_eq!(CubeChain::parse_id(&c.id()).unwrap(), c);
        assert_eq!(CubeChain::parse_id("root").unwrap(), CubeChain::default());
    }
}
