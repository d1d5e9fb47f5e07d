//! The four-level tower GF(p) ⊆ GF(q) ⊆ GF(q^k) ⊆ GF(q^m), m = t·k.
//!
//! Every defining polynomial is the first monic irreducible in lexicographic
//! coefficient order, and ξ is the first element of GF(q^k) with full
//! order, so a tower is a pure function of `(p, a, k, t)`.
//!
//! Top-level elements live in the basis 1, γ, …, γ^(t−1) over GF(q^k). All
//! GF(q)-linear algebra goes through [`FieldTower::flatten`], which lays the
//! coordinates out γ-power major, GF(q)-coordinate minor.

pub mod factor;
pub mod poly;
pub mod small;
pub mod top;

use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;
use thiserror::Error;

pub use small::SmallField;
pub use top::{Top, TopField};

use crate::linalg::Scalars;

/// Arithmetic shared by every level, for code generic over the field.
pub trait FieldOps {
    type Elem: Clone + PartialEq + Eq + std::hash::Hash + std::fmt::Debug;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn is_zero(&self, x: &Self::Elem) -> bool;
    fn add(&self, x: &Self::Elem, y: &Self::Elem) -> Self::Elem;
    fn sub(&self, x: &Self::Elem, y: &Self::Elem) -> Self::Elem;
    fn neg(&self, x: &Self::Elem) -> Self::Elem;
    fn mul(&self, x: &Self::Elem, y: &Self::Elem) -> Self::Elem;
    fn inv(&self, x: &Self::Elem) -> Option<Self::Elem>;
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("deterministic search exhausted: {0}")]
    SearchExhausted(&'static str),
    #[error("division by zero")]
    DivisionByZero,
    #[error("level mismatch: {0:?} vs {1:?}")]
    LevelMismatch(Level, Level),
    #[error("the zero element has no multiplicative order")]
    ZeroElement,
    #[error("element does not lie in {0:?}")]
    NotInSubfield(Level),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("field too large for this operation")]
    TooLarge,
    #[error("invalid tower specification: {0}")]
    InvalidSpec(String),
}

/// A level of the tower, from the prime field upwards.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    Prime,
    Base,
    Mid,
    Top,
}

/// An element of one level, as coefficients over the level immediately
/// below (a single residue for the prime field).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FieldElement {
    pub level: Level,
    pub coeffs: SmallVec<[u32; 8]>,
}

impl FieldElement {
    pub fn top(coeffs: Top) -> Self {
        FieldElement {
            level: Level::Top,
            coeffs,
        }
    }
}

/// Serializable description of a tower. Polynomials are coefficient arrays,
/// low degree first, with each coefficient written out recursively down to
/// GF(p) digits.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TowerSpec {
    pub p: u32,
    pub a: u32,
    pub k: u32,
    pub t: u32,
    pub def_poly_q: Vec<u32>,
    pub def_poly_k: Vec<Vec<u32>>,
    pub def_poly_top: Vec<Vec<Vec<u32>>>,
    pub xi: Vec<Vec<u32>>,
}

#[derive(Debug)]
pub struct FieldTower {
    p: u32,
    a: u32,
    k: u32,
    t: u32,
    prime: SmallField,
    base: Arc<SmallField>,
    mid: Arc<SmallField>,
    top: TopField,
    xi: u32,
    scalars: Scalars,
    // generator of GF(q^d) inside the top field, for every d | m
    subfield_gens: Vec<(u32, Top)>,
}

fn first_irreducible(field: &SmallField, degree: usize) -> Result<Vec<u32>, FieldError> {
    let b = field.order() as u64;
    let count = b
        .checked_pow(degree as u32)
        .ok_or(FieldError::SearchExhausted("irreducible polynomial"))?;
    for n in 0..count {
        // c₀ is the most significant digit of n
        let mut coeffs = vec![0u32; degree + 1];
        let mut rest = n;
        for i in (0..degree).rev() {
            coeffs[i] = (rest % b) as u32;
            rest /= b;
        }
        coeffs[degree] = 1;
        if coeffs[0] == 0 {
            continue;
        }
        if poly::is_irreducible(field, b, &coeffs) {
            return Ok(coeffs);
        }
    }
    Err(FieldError::SearchExhausted("irreducible polynomial"))
}

impl FieldTower {
    /// Deterministically builds the tower for `q = p^a`, middle degree `k`
    /// and top degree `t` over the middle field.
    pub fn build(p: u32, a: u32, k: u32, t: u32) -> Result<Self, FieldError> {
        if a == 0 || k == 0 || t == 0 {
            return Err(FieldError::InvalidParameter("a, k, t must be >= 1".into()));
        }
        let prime = SmallField::prime(p)?;
        let def_q = first_irreducible(&prime, a as usize)?;
        let base = SmallField::extension(&prime, &def_q)?;
        let def_k = first_irreducible(&base, k as usize)?;
        let mid = SmallField::extension(&base, &def_k)?;
        let def_top = first_irreducible(&mid, t as usize)?;
        Self::assemble(p, a, k, t, prime, base, mid, def_top)
    }

    #[allow(clippy::too_many_arguments)]
    fn assemble(
        p: u32,
        a: u32,
        k: u32,
        t: u32,
        prime: SmallField,
        base: SmallField,
        mid: SmallField,
        def_top: Vec<u32>,
    ) -> Result<Self, FieldError> {
        if base.order() > 256 {
            return Err(FieldError::TooLarge);
        }
        let scalars = Scalars::from_field(&base);
        let xi = mid.generator();
        let mid = Arc::new(mid);
        let top = TopField::new(mid.clone(), def_top);
        let mut tower = FieldTower {
            p,
            a,
            k,
            t,
            prime,
            base: Arc::new(base),
            mid,
            top,
            xi,
            scalars,
            subfield_gens: Vec::new(),
        };
        let m = tower.m() as u64;
        tower.subfield_gens = factor::divisors(m)
            .into_iter()
            .map(|d| {
                tower
                    .search_subfield_generator(d as u32)
                    .map(|g| (d as u32, g))
            })
            .collect::<Result<_, _>>()?;
        Ok(tower)
    }

    /// Rebuilds a tower from its serialized form, checking irreducibility of
    /// every defining polynomial and primitivity of ξ.
    pub fn from_spec(spec: &TowerSpec) -> Result<Self, FieldError> {
        let bad = |m: &str| FieldError::InvalidSpec(m.to_string());
        let prime = SmallField::prime(spec.p)?;
        if spec.def_poly_q.len() != spec.a as usize + 1
            || !poly::is_irreducible(&prime, spec.p as u64, &spec.def_poly_q)
        {
            return Err(bad("def_poly_q is not an irreducible of degree a"));
        }
        let base = SmallField::extension(&prime, &spec.def_poly_q)?;
        let def_k: Vec<u32> = spec
            .def_poly_k
            .iter()
            .map(|c| base.from_coeffs(c))
            .collect();
        if def_k.len() != spec.k as usize + 1
            || !poly::is_irreducible(&base, base.order() as u64, &def_k)
        {
            return Err(bad("def_poly_k is not an irreducible of degree k"));
        }
        let mid = SmallField::extension(&base, &def_k)?;
        let def_top: Vec<u32> = spec
            .def_poly_top
            .iter()
            .map(|c| mid.from_coeffs(&c.iter().map(|d| base.from_coeffs(d)).collect::<Vec<_>>()))
            .collect();
        if def_top.len() != spec.t as usize + 1
            || !poly::is_irreducible(&mid, mid.order() as u64, &def_top)
        {
            return Err(bad("def_poly_top is not an irreducible of degree t"));
        }
        let xi = mid.from_coeffs(
            &spec
                .xi
                .iter()
                .map(|d| base.from_coeffs(d))
                .collect::<Vec<_>>(),
        );
        if mid.element_order(xi) != Some(mid.order() as u64 - 1) {
            return Err(bad("xi is not primitive"));
        }
        let mut tower = Self::assemble(spec.p, spec.a, spec.k, spec.t, prime, base, mid, def_top)?;
        tower.xi = xi;
        Ok(tower)
    }

    pub fn spec(&self) -> TowerSpec {
        let base_digits = |x: u32| self.base.coeffs(x);
        let mid_digits =
            |x: u32| -> Vec<Vec<u32>> { self.mid.coeffs(x).into_iter().map(base_digits).collect() };
        TowerSpec {
            p: self.p,
            a: self.a,
            k: self.k,
            t: self.t,
            def_poly_q: self.base.modulus().to_vec(),
            def_poly_k: self.mid.modulus().iter().map(|&c| base_digits(c)).collect(),
            def_poly_top: self.top.modulus().iter().map(|&c| mid_digits(c)).collect(),
            xi: mid_digits(self.xi),
        }
    }

    pub fn p(&self) -> u32 {
        self.p
    }
    pub fn a(&self) -> u32 {
        self.a
    }
    /// Size of the scalar field GF(q).
    pub fn q(&self) -> u32 {
        self.base.order()
    }
    /// Degree of the middle field over GF(q).
    pub fn k(&self) -> u32 {
        self.k
    }
    /// Degree of the top field over the middle field.
    pub fn t(&self) -> u32 {
        self.t
    }
    /// Degree of the top field over GF(q).
    pub fn m(&self) -> usize {
        (self.k * self.t) as usize
    }
    pub fn prime_field(&self) -> &SmallField {
        &self.prime
    }
    pub fn base(&self) -> &SmallField {
        &self.base
    }
    pub fn mid(&self) -> &SmallField {
        &self.mid
    }
    pub fn top(&self) -> &TopField {
        &self.top
    }
    pub fn scalars(&self) -> &Scalars {
        &self.scalars
    }
    /// The primitive element ξ of the middle field.
    pub fn xi(&self) -> u32 {
        self.xi
    }
    pub fn xi_pow(&self, e: u64) -> u32 {
        self.mid.pow(self.xi, e)
    }
    /// The exponent e with ξ^e = x, for nonzero `x` in the middle field.
    pub fn xi_log(&self, x: u32) -> Option<u64> {
        let n = self.mid.order() as u64 - 1;
        let lx = self.mid.log(x)? as u64;
        let lxi = self.mid.log(self.xi)? as u64;
        // ξ = g^lxi with lxi a unit mod n, so e = lx / lxi mod n
        let inv = (0..n).find(|&i| (i * lxi) % n == 1 % n)?;
        Some((lx * inv) % n)
    }

    /// Constant term f(0) of the top defining polynomial.
    pub fn top_constant_term(&self) -> u32 {
        self.top.modulus()[0]
    }
    pub fn gamma(&self) -> Top {
        self.top.gamma()
    }

    /// q^m, the size of the top field.
    pub fn top_order(&self) -> BigUint {
        BigUint::from(self.q()).pow(self.m() as u32)
    }

    /// Number of GF(q)*-classes of nonzero top elements, if it fits in `u64`.
    pub fn projective_count(&self) -> Option<u64> {
        ((self.top_order() - 1u32) / (self.q() - 1)).to_u64()
    }

    // ---- flattening -----------------------------------------------------

    /// GF(q)-coordinates of a top element.
    pub fn flatten(&self, x: &Top) -> Vec<u8> {
        let q = self.q();
        let k = self.k as usize;
        let mut out = Vec::with_capacity(self.m());
        for &c in x {
            let mut c = c;
            for _ in 0..k {
                out.push((c % q) as u8);
                c /= q;
            }
        }
        out
    }

    pub fn unflatten(&self, coords: &[u8]) -> Top {
        let q = self.q();
        coords
            .chunks(self.k as usize)
            .map(|ch| ch.iter().rev().fold(0u32, |acc, &d| acc * q + d as u32))
            .collect()
    }

    /// Scales `x` so its first nonzero GF(q)-coordinate is 1 and returns the
    /// coordinates; the canonical label of the projective point `x·GF(q)*`.
    pub fn projective_key(&self, x: &Top) -> Vec<u8> {
        let mut coords = self.flatten(x);
        self.scalars.normalize(&mut coords);
        coords
    }

    /// The `n`-th normalized nonzero top element, for `n < projective_count()`.
    /// Ordered by position of the leading 1, then by the trailing
    /// coordinates read as a base-q number.
    pub fn projective_rep_at(&self, n: u64) -> Top {
        let q = self.q() as u64;
        let m = self.m();
        let mut coords = vec![0u8; m];
        let mut n = n;
        for lead in 0..m {
            let block = q.pow((m - 1 - lead) as u32);
            if n < block {
                coords[lead] = 1;
                for c in coords.iter_mut().skip(lead + 1) {
                    *c = (n % q) as u8;
                    n /= q;
                }
                return self.unflatten(&coords);
            }
            n -= block;
        }
        panic!("projective index out of range")
    }

    // ---- generic element API -------------------------------------------

    fn level_digits(&self, level: Level) -> (usize, u32) {
        match level {
            Level::Prime => (1, self.p),
            Level::Base => (self.a as usize, self.p),
            Level::Mid => (self.k as usize, self.q()),
            Level::Top => (self.t as usize, self.mid.order()),
        }
    }

    fn small(&self, level: Level) -> &SmallField {
        match level {
            Level::Prime => &self.prime,
            Level::Base => &self.base,
            Level::Mid => &self.mid,
            Level::Top => unreachable!("top level is not table-driven"),
        }
    }

    /// Checks shape and digit ranges of an element.
    pub fn validate(&self, x: &FieldElement) -> Result<(), FieldError> {
        let (len, b) = self.level_digits(x.level);
        if x.coeffs.len() != len || x.coeffs.iter().any(|&c| c >= b) {
            return Err(FieldError::InvalidParameter(format!(
                "malformed {:?} element {:?}",
                x.level, x.coeffs
            )));
        }
        Ok(())
    }

    pub fn zero(&self, level: Level) -> FieldElement {
        FieldElement {
            level,
            coeffs: SmallVec::from_elem(0, self.level_digits(level).0),
        }
    }

    pub fn one(&self, level: Level) -> FieldElement {
        let mut x = self.zero(level);
        x.coeffs[0] = 1;
        x
    }

    /// Index of a small-level element in its table-driven field.
    pub fn index_of(&self, x: &FieldElement) -> u32 {
        match x.level {
            Level::Prime => x.coeffs[0],
            Level::Base => small::undigits(&x.coeffs, self.p),
            Level::Mid => small::undigits(&x.coeffs, self.q()),
            Level::Top => panic!("top elements have no table index"),
        }
    }

    pub fn from_index(&self, level: Level, idx: u32) -> FieldElement {
        let (len, b) = self.level_digits(level);
        FieldElement {
            level,
            coeffs: small::digits(idx, b, len).into_iter().collect(),
        }
    }

    pub fn mid_element(&self, idx: u32) -> FieldElement {
        self.from_index(Level::Mid, idx)
    }

    fn binary(
        &self,
        x: &FieldElement,
        y: &FieldElement,
        small_op: impl Fn(&SmallField, u32, u32) -> u32,
        top_op: impl Fn(&TopField, &Top, &Top) -> Top,
    ) -> Result<FieldElement, FieldError> {
        if x.level != y.level {
            return Err(FieldError::LevelMismatch(x.level, y.level));
        }
        self.validate(x)?;
        self.validate(y)?;
        Ok(match x.level {
            Level::Top => FieldElement::top(top_op(&self.top, &x.coeffs, &y.coeffs)),
            lv => {
                let f = self.small(lv);
                self.from_index(lv, small_op(f, self.index_of(x), self.index_of(y)))
            }
        })
    }

    pub fn add(&self, x: &FieldElement, y: &FieldElement) -> Result<FieldElement, FieldError> {
        self.binary(x, y, |f, a, b| f.add(a, b), |f, a, b| f.add(a, b))
    }

    pub fn sub(&self, x: &FieldElement, y: &FieldElement) -> Result<FieldElement, FieldError> {
        self.binary(x, y, |f, a, b| f.sub(a, b), |f, a, b| f.sub(a, b))
    }

    pub fn mul(&self, x: &FieldElement, y: &FieldElement) -> Result<FieldElement, FieldError> {
        self.binary(x, y, |f, a, b| f.mul(a, b), |f, a, b| f.mul(a, b))
    }

    pub fn neg(&self, x: &FieldElement) -> Result<FieldElement, FieldError> {
        self.sub(&self.zero(x.level), x)
    }

    pub fn inv(&self, x: &FieldElement) -> Result<FieldElement, FieldError> {
        self.validate(x)?;
        match x.level {
            Level::Top => self
                .top
                .inv(&x.coeffs)
                .map(FieldElement::top)
                .ok_or(FieldError::DivisionByZero),
            lv => self
                .small(lv)
                .inv(self.index_of(x))
                .map(|i| self.from_index(lv, i))
                .ok_or(FieldError::DivisionByZero),
        }
    }

    pub fn pow(&self, x: &FieldElement, e: &BigUint) -> Result<FieldElement, FieldError> {
        self.validate(x)?;
        Ok(match x.level {
            Level::Top => FieldElement::top(self.top.pow_big(&x.coeffs, e)),
            lv => {
                let f = self.small(lv);
                let idx = self.index_of(x);
                let out = if e.bits() == 0 {
                    1
                } else if idx == 0 {
                    0
                } else {
                    let n = BigUint::from(f.order() - 1);
                    f.exp((e % n).to_u64().unwrap_or(0))
                };
                self.from_index(lv, out)
            }
        })
    }

    /// x ↦ x^q.
    pub fn frobenius(&self, x: &FieldElement) -> Result<FieldElement, FieldError> {
        self.pow(x, &BigUint::from(self.q()))
    }

    /// Includes an element into a higher (or equal) level.
    pub fn embed(&self, x: &FieldElement, to: Level) -> Result<FieldElement, FieldError> {
        self.validate(x)?;
        if to < x.level {
            return Err(FieldError::LevelMismatch(x.level, to));
        }
        let mut cur = x.clone();
        while cur.level < to {
            let next = match cur.level {
                Level::Prime => Level::Base,
                Level::Base => Level::Mid,
                Level::Mid => Level::Top,
                Level::Top => unreachable!(),
            };
            let inner = match cur.level {
                Level::Top => unreachable!(),
                _ => self.index_of(&cur),
            };
            let mut out = self.zero(next);
            out.coeffs[0] = inner;
            cur = out;
        }
        Ok(cur)
    }

    /// Inverse of [`Self::embed`]; fails if `x` is not in the lower level.
    pub fn section(&self, x: &FieldElement, to: Level) -> Result<FieldElement, FieldError> {
        self.validate(x)?;
        if to > x.level {
            return Err(FieldError::LevelMismatch(x.level, to));
        }
        let mut cur = x.clone();
        while cur.level > to {
            if cur.coeffs[1..].iter().any(|&c| c != 0) {
                return Err(FieldError::NotInSubfield(to));
            }
            let lower = match cur.level {
                Level::Top => Level::Mid,
                Level::Mid => Level::Base,
                Level::Base => Level::Prime,
                Level::Prime => unreachable!(),
            };
            cur = self.from_index(lower, cur.coeffs[0]);
        }
        Ok(cur)
    }

    /// Multiplicative order, by factoring the group order and dividing out
    /// primes while the power stays 1.
    pub fn element_order(&self, x: &FieldElement) -> Result<u64, FieldError> {
        self.validate(x)?;
        let group = match x.level {
            Level::Top => (self.top_order() - 1u32)
                .to_u64()
                .ok_or(FieldError::TooLarge)?,
            lv => self.small(lv).order() as u64 - 1,
        };
        let is_one = |e: u64| -> bool {
            match x.level {
                Level::Top => self.top.pow(&x.coeffs, e) == self.top.one(),
                lv => self.small(lv).pow(self.index_of(x), e) == 1,
            }
        };
        if *x == self.zero(x.level) {
            return Err(FieldError::ZeroElement);
        }
        let mut order = group;
        for l in factor::distinct_prime_factors(group) {
            while order % l == 0 && is_one(order / l) {
                order /= l;
            }
        }
        Ok(order)
    }

    /// Tests `x^(q^d) = x`, i.e. membership of a top element in GF(q^d).
    pub fn in_subfield(&self, x: &Top, d: u32) -> bool {
        let mut y = x.clone();
        for _ in 0..d {
            y = self.top.pow(&y, self.q() as u64);
        }
        y == *x
    }

    /// An element of the top field generating its subfield GF(q^d) over
    /// GF(q), for `d | m`.
    pub fn subfield_generator(&self, d: u32) -> Result<Top, FieldError> {
        self.subfield_gens
            .iter()
            .find(|(e, _)| *e == d)
            .map(|(_, g)| g.clone())
            .ok_or_else(|| {
                FieldError::InvalidParameter(format!("{d} does not divide {}", self.m()))
            })
    }

    /// Divisors `d` of `m` paired with a generator of GF(q^d), ascending.
    pub fn subfield_generators(&self) -> &[(u32, Top)] {
        &self.subfield_gens
    }

    // the first x^((q^m−1)/(q^d−1)) over projective representatives x that
    // lies in no proper subfield of GF(q^d)
    fn search_subfield_generator(&self, d: u32) -> Result<Top, FieldError> {
        let m = self.m() as u32;
        if d == 0 || !m.is_multiple_of(d) {
            return Err(FieldError::InvalidParameter(format!(
                "{d} does not divide {m}"
            )));
        }
        if d == 1 {
            return Ok(self.top.one());
        }
        let q = BigUint::from(self.q());
        let cofactor = (q.pow(m) - 1u32) / (q.pow(d) - 1u32);
        let proper: Vec<u32> = factor::divisors(d as u64)
            .into_iter()
            .filter(|&e| e < d as u64)
            .map(|e| e as u32)
            .collect();
        let count = self.projective_count().unwrap_or(u64::MAX);
        for n in 0..count {
            let x = self.projective_rep_at(n);
            let y = self.top.pow_big(&x, &cofactor);
            if proper.iter().all(|&e| !self.in_subfield(&y, e)) {
                return Ok(y);
            }
        }
        Err(FieldError::SearchExhausted("subfield generator"))
    }
}

#[cfg(test)]
mod tests;
