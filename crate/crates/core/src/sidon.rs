//! Sidon spaces of GF(q^n) built coefficient-wise in the basis 1, γ, …,
//! γ^(t−1), with n = (2r+1)k (odd families) or n = 2rk (even families).
//!
//! U-families map u ∈ GF(q^k) to
//! `u + Σ_{a≤rep} (θu^q + u)δ_{al}γ^{al} + Σ_{other b≤r} u·δ_b·γ^b`,
//! V-families map v to `v + v^q·γ^l + Σ_{b≠l} v·δ_b·γ^b`.

use std::collections::HashSet;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::{FieldTower, Top};
use crate::subspace::Subspace;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SidonError {
    #[error("tower shape k={k}, t={t} is not n = (2r+1)k or n = 2rk with r >= 2, k >= 2")]
    BadShape { k: u32, t: u32 },
    #[error("invalid construction parameters: {0}")]
    InvalidParams(String),
    #[error("set A search found {found} exponents, needed {needed}")]
    GreedyFellShort { found: usize, needed: usize },
    #[error("the two subspaces are equal")]
    EqualInputs,
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Odd,
    Even,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    UOdd,
    VOdd,
    UEven,
    VEven,
}

impl Family {
    pub fn parity(self) -> Parity {
        match self {
            Family::UOdd | Family::VOdd => Parity::Odd,
            Family::UEven | Family::VEven => Parity::Even,
        }
    }

    pub fn is_u(self) -> bool {
        matches!(self, Family::UOdd | Family::UEven)
    }

    fn of(parity: Parity, u: bool) -> Family {
        match (parity, u) {
            (Parity::Odd, true) => Family::UOdd,
            (Parity::Odd, false) => Family::VOdd,
            (Parity::Even, true) => Family::UEven,
            (Parity::Even, false) => Family::VEven,
        }
    }
}

/// One member of a family. Field elements are given as ξ-exponents;
/// `deltas[b-1]` is δ_b, absent for the unused slot δ_l of a V-family.
/// V-families carry `rep = 1` and no θ.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ConstructionParams {
    pub family: Family,
    pub r: u32,
    pub rep: u32,
    pub l: u32,
    pub deltas: Vec<Option<u32>>,
    pub theta: Option<u32>,
}

/// p₀, the largest repetition index with a nonempty l-range.
pub fn compute_p0(r: u32, parity: Parity) -> u32 {
    match parity {
        Parity::Odd => (1..=r).filter(|&i| r / i > r / (i + 1)).max().unwrap_or(1),
        Parity::Even if r == 2 => 1,
        Parity::Even => (1..=r)
            .filter(|&i| r.div_ceil(i) - 1 > r / (i + 1))
            .max()
            .unwrap_or(1),
    }
}

/// Admissible l for a repetition index (U-families); V-families use `rep = 1`.
pub fn l_range(parity: Parity, r: u32, rep: u32) -> std::ops::RangeInclusive<u32> {
    match (parity, rep) {
        (Parity::Odd, 1) => 1..=r,
        (Parity::Even, 1) => 1..=r - 1,
        (Parity::Odd, p) => r / (p + 1) + 1..=r / p,
        (Parity::Even, p) => r / (p + 1) + 1..=r.div_ceil(p) - 1,
    }
}

/// Σ_{i=2}^{p₀} of the l-range sizes: the extra U-orbit classes contributed
/// by repetition indices above 1.
pub fn extra_l_count(parity: Parity, r: u32) -> u32 {
    (2..=compute_p0(r, parity))
        .map(|p| l_range(parity, r, p).count() as u32)
        .sum()
}

/// Exponent set I of size ⌊(Q−2)/2⌋ with c·ξ^(i+j) ≠ 1 for all i, j ∈ I,
/// where c = ξ^e. Greedy in increasing exponent order, with an exhaustive
/// fallback.
pub fn set_a_exponents(e: u64, order: u64) -> Result<Vec<u64>, SidonError> {
    let n = order - 1;
    let needed = (order.saturating_sub(2) / 2) as usize;
    let ok = |i: u64, chosen: &[u64]| {
        !(e + 2 * i).is_multiple_of(n) && chosen.iter().all(|&j| !(e + i + j).is_multiple_of(n))
    };
    let mut chosen = Vec::with_capacity(needed);
    for i in 0..n {
        if chosen.len() == needed {
            break;
        }
        if ok(i, &chosen) {
            chosen.push(i);
        }
    }
    if chosen.len() < needed {
        let found = chosen.len();
        chosen.clear();
        if !dfs(0, n, needed, &mut chosen, &ok) {
            return Err(SidonError::GreedyFellShort { found, needed });
        }
    }
    Ok(chosen)
}

fn dfs(
    from: u64,
    n: u64,
    needed: usize,
    chosen: &mut Vec<u64>,
    ok: &dyn Fn(u64, &[u64]) -> bool,
) -> bool {
    if chosen.len() == needed {
        return true;
    }
    for i in from..n {
        if ok(i, chosen) {
            chosen.push(i);
            if dfs(i + 1, n, needed, chosen, ok) {
                return true;
            }
            chosen.pop();
        }
    }
    false
}

/// The construction context for one tower: its parity, r, and (for even
/// towers) the set A.
#[derive(Debug)]
pub struct Constructions<'a> {
    tower: &'a FieldTower,
    parity: Parity,
    r: u32,
    set_a: Vec<u32>,
}

struct Block {
    family: Family,
    rep: u32,
    l: u32,
    // per δ slot: number of choices, or None for the absent δ_l
    radices: Vec<Option<u64>>,
    thetas: u64,
}

impl Block {
    fn size(&self) -> BigUint {
        self.radices
            .iter()
            .flatten()
            .fold(BigUint::from(self.thetas), |acc, &r| acc * r)
    }
}

impl<'a> Constructions<'a> {
    pub fn new(tower: &'a FieldTower) -> Result<Self, SidonError> {
        let (k, t) = (tower.k(), tower.t());
        let (parity, r) = if t % 2 == 1 {
            (Parity::Odd, (t - 1) / 2)
        } else {
            (Parity::Even, t / 2)
        };
        if k < 2 || r < 2 {
            return Err(SidonError::BadShape { k, t });
        }
        let set_a = match parity {
            Parity::Odd => Vec::new(),
            Parity::Even => {
                let e = tower
                    .xi_log(tower.top_constant_term())
                    .expect("f(0) is nonzero");
                let order = tower.mid().order() as u64;
                let exps = set_a_exponents(e, order)?;
                // replay the defining condition in the field itself
                let mid = tower.mid();
                let c = tower.top_constant_term();
                for &i in &exps {
                    for &j in &exps {
                        let prod = mid.mul(c, mid.mul(tower.xi_pow(i), tower.xi_pow(j)));
                        assert_ne!(prod, 1, "set A violates its defining condition");
                    }
                }
                exps.into_iter().map(|x| x as u32).collect()
            }
        };
        Ok(Constructions {
            tower,
            parity,
            r,
            set_a,
        })
    }

    pub fn tower(&self) -> &FieldTower {
        self.tower
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn p0(&self) -> u32 {
        compute_p0(self.r, self.parity)
    }

    /// ξ-exponents of the set A (empty for odd towers).
    pub fn set_a(&self) -> &[u32] {
        &self.set_a
    }

    fn blocks(&self) -> Vec<Block> {
        let units = self.tower.mid().order() as u64 - 1;
        let q = self.tower.q() as u64;
        let r = self.r as usize;
        let radices = |skip: Option<u32>| -> Vec<Option<u64>> {
            (1..=r)
                .map(|b| {
                    if Some(b as u32) == skip {
                        None
                    } else if b == r && self.parity == Parity::Even {
                        Some(self.set_a.len() as u64)
                    } else {
                        Some(units)
                    }
                })
                .collect()
        };
        let mut out = Vec::new();
        for rep in 1..=self.p0() {
            for l in l_range(self.parity, self.r, rep) {
                out.push(Block {
                    family: Family::of(self.parity, true),
                    rep,
                    l,
                    radices: radices(None),
                    thetas: q - 1,
                });
            }
        }
        for l in l_range(self.parity, self.r, 1) {
            out.push(Block {
                family: Family::of(self.parity, false),
                rep: 1,
                l,
                radices: radices(Some(l)),
                thetas: 1,
            });
        }
        out
    }

    /// Number of admissible parameter tuples.
    pub fn count(&self) -> BigUint {
        self.blocks().iter().map(Block::size).sum()
    }

    /// Every admissible tuple exactly once: U-families by (rep, l), then
    /// V-families by l; within a block δ-exponents vary lexicographically
    /// (δ₁ slowest) and θ fastest.
    pub fn enumerate(&self) -> impl Iterator<Item = ConstructionParams> + '_ {
        let r = self.r;
        self.blocks().into_iter().flat_map(move |block| {
            let size = block.size();
            let size: u64 = size.try_into().expect("block too large to enumerate");
            (0..size).map(move |mut n| {
                let theta = if block.family.is_u() {
                    let th = n % block.thetas;
                    n /= block.thetas;
                    Some(th as u32)
                } else {
                    None
                };
                let mut deltas = vec![None; block.radices.len()];
                for (b, radix) in block.radices.iter().enumerate().rev() {
                    if let Some(radix) = radix {
                        let digit = (n % radix) as u32;
                        n /= radix;
                        let even_last =
                            b + 1 == r as usize && block.family.parity() == Parity::Even;
                        deltas[b] = Some(if even_last {
                            self.set_a[digit as usize]
                        } else {
                            digit
                        });
                    }
                }
                ConstructionParams {
                    family: block.family,
                    r,
                    rep: block.rep,
                    l: block.l,
                    deltas,
                    theta,
                }
            })
        })
    }

    /// Checks a tuple against the family invariants for this tower.
    pub fn validate(&self, p: &ConstructionParams) -> Result<(), SidonError> {
        let bad = |m: String| Err(SidonError::InvalidParams(m));
        if p.family.parity() != self.parity {
            return bad(format!(
                "{:?} does not match a {:?} tower",
                p.family, self.parity
            ));
        }
        if p.r != self.r {
            return bad(format!("r = {} but the tower has r = {}", p.r, self.r));
        }
        if p.deltas.len() != self.r as usize {
            return bad(format!(
                "expected {} deltas, got {}",
                self.r,
                p.deltas.len()
            ));
        }
        let units = self.tower.mid().order() - 1;
        if p.family.is_u() {
            if p.rep < 1 || p.rep > self.p0() {
                return bad(format!("rep = {} outside 1..={}", p.rep, self.p0()));
            }
            match p.theta {
                Some(th) if th < self.tower.q() - 1 => {}
                _ => return bad("theta must be a ξ-exponent below q-1".into()),
            }
        } else {
            if p.rep != 1 {
                return bad("V-families take rep = 1".into());
            }
            if p.theta.is_some() {
                return bad("V-families take no theta".into());
            }
        }
        if !l_range(self.parity, self.r, p.rep).contains(&p.l) {
            return bad(format!(
                "l = {} outside the admissible range for rep = {}",
                p.l, p.rep
            ));
        }
        for (i, d) in p.deltas.iter().enumerate() {
            let b = i as u32 + 1;
            let absent = !p.family.is_u() && b == p.l;
            match (d, absent) {
                (None, true) => {}
                (Some(_), true) => return bad(format!("delta_{b} is unused and must be null")),
                (None, false) => return bad(format!("delta_{b} is missing")),
                (Some(e), false) => {
                    if *e >= units {
                        return bad(format!("delta_{b} exponent {e} out of range"));
                    }
                    if self.parity == Parity::Even && b == self.r && !self.set_a.contains(e) {
                        return bad(format!("delta_{b} = ξ^{e} is not in the set A"));
                    }
                }
            }
        }
        Ok(())
    }

    /// Image of the standard basis of GF(q^k) under the family's map.
    pub fn generator_elements(&self, p: &ConstructionParams) -> Result<Vec<Top>, SidonError> {
        self.validate(p)?;
        let tower = self.tower;
        let mid = tower.mid();
        let q = tower.q();
        let xi_pow = |e: u32| tower.xi_pow(e as u64);
        let delta = |b: u32| p.deltas[b as usize - 1].map(xi_pow);
        let mut out = Vec::with_capacity(tower.k() as usize);
        let mut u = 1u32;
        for _ in 0..tower.k() {
            let uq = mid.pow(u, q as u64);
            let mut c: Top = smallvec::smallvec![0; tower.t() as usize];
            c[0] = u;
            if p.family.is_u() {
                let w = mid.add(mid.mul(xi_pow(p.theta.unwrap_or(0)), uq), u);
                for b in 1..=p.r {
                    let d = delta(b).expect("validated");
                    let repeated = b % p.l == 0 && b / p.l <= p.rep;
                    c[b as usize] = mid.mul(if repeated { w } else { u }, d);
                }
            } else {
                for b in 1..=p.r {
                    c[b as usize] = match delta(b) {
                        None => uq,
                        Some(d) => mid.mul(u, d),
                    };
                }
            }
            out.push(c);
            // next standard basis element y^j has index q^j
            u *= q;
        }
        Ok(out)
    }

    pub fn make_subspace(&self, p: &ConstructionParams) -> Result<Subspace, SidonError> {
        let elems = self.generator_elements(p)?;
        let s = Subspace::span(self.tower, &elems);
        if s.dim() != self.tower.k() as usize {
            return Err(SidonError::InvalidParams(format!(
                "image has dimension {} instead of {}",
                s.dim(),
                self.tower.k()
            )));
        }
        Ok(s)
    }
}

/// Definition-level Sidon test: normalized products of unordered pairs of
/// projective points must be pairwise distinct.
pub fn is_sidon(tower: &FieldTower, u: &Subspace) -> bool {
    let pts = u.points(tower);
    let top = tower.top();
    let mut seen = HashSet::with_capacity(pts.len() * (pts.len() + 1) / 2);
    for (i, a) in pts.iter().enumerate() {
        for b in &pts[i..] {
            if !seen.insert(tower.projective_key(&top.mul(a, b))) {
                return false;
            }
        }
    }
    true
}

/// The product criterion for dim(U ∩ αV) ≤ 1 for all α: all products of a
/// point of U with a point of V are distinct projective points.
pub fn cross_pair_ok(tower: &FieldTower, u: &Subspace, v: &Subspace) -> Result<bool, SidonError> {
    if u == v {
        return Err(SidonError::EqualInputs);
    }
    if u.dim() != v.dim() {
        return Err(SidonError::DimensionMismatch(u.dim(), v.dim()));
    }
    let pu = u.points(tower);
    let pv = v.points(tower);
    let top = tower.top();
    let mut seen = HashSet::with_capacity(pu.len() * pv.len());
    for a in &pu {
        for b in &pv {
            if !seen.insert(tower.projective_key(&top.mul(a, b))) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests;
