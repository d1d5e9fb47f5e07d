//! Linearized q-polynomials Σ aᵢ x^(qⁱ), their root spaces, and the rank
//! and coefficient conditions that make a union of their orbits a code.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigUint;
use num_integer::Integer;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::{poly, FieldElement, FieldError, FieldTower, Level, Top};
use crate::linalg::rank_over;
use crate::subspace::Subspace;

#[derive(Debug, Error)]
pub enum PolyError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("coefficients live in different levels")]
    MixedLevels,
    #[error("cannot shift by zero")]
    ZeroShift,
    #[error("kernel never reached full dimension for N up to {0}")]
    NotFoundWithinBound(u32),
    #[error("gcd degree {0} is not a power of q")]
    NonPowerDegree(usize),
    #[error("bad support: {0}")]
    BadSupport(String),
    #[error("this check needs q = 2, got q = {0}")]
    WrongCharacteristic(u32),
    #[error("polynomial {index} has a {found}-dimensional root space, expected {expected}")]
    NotSplitting {
        index: usize,
        found: usize,
        expected: usize,
    },
    #[error("scan needs {needed} iterations, budget is {budget}")]
    Infeasible { needed: BigUint, budget: u64 },
    #[error("invalid input: {0}")]
    Invalid(String),
}

/// Σ aᵢ x^(qⁱ) with all coefficients in one tower level. `coeffs[i]` is aᵢ;
/// trailing zeros are trimmed so the last entry is the leading coefficient.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearizedPolynomial {
    level: Level,
    coeffs: Vec<FieldElement>,
}

impl LinearizedPolynomial {
    pub fn new(
        tower: &FieldTower,
        level: Level,
        coeffs: Vec<FieldElement>,
    ) -> Result<Self, PolyError> {
        for c in &coeffs {
            if c.level != level {
                return Err(PolyError::MixedLevels);
            }
            tower.validate(c)?;
        }
        let mut coeffs = coeffs;
        while coeffs
            .last()
            .is_some_and(|c| c.coeffs.iter().all(|&d| d == 0))
        {
            coeffs.pop();
        }
        Ok(LinearizedPolynomial { level, coeffs })
    }

    /// Builds a polynomial from (exponent, coefficient) pairs.
    pub fn from_terms(
        tower: &FieldTower,
        level: Level,
        terms: &[(usize, FieldElement)],
    ) -> Result<Self, PolyError> {
        let len = terms.iter().map(|(e, _)| e + 1).max().unwrap_or(0);
        let mut coeffs = vec![tower.zero(level); len];
        for (e, c) in terms {
            coeffs[*e] = c.clone();
        }
        Self::new(tower, level, coeffs)
    }

    /// Monic polynomial over the middle field from mid indices, `coeffs[i]`
    /// being aᵢ.
    pub fn from_mid(tower: &FieldTower, coeffs: &[u32]) -> Result<Self, PolyError> {
        let elems = coeffs.iter().map(|&c| tower.mid_element(c)).collect();
        Self::new(tower, Level::Mid, elems)
    }

    /// x^(q^k) − x, whose roots form GF(q^k).
    pub fn frobenius_minus_identity(tower: &FieldTower, k: usize) -> Self {
        let mut coeffs = vec![tower.zero(Level::Base); k + 1];
        coeffs[0] = tower.neg(&tower.one(Level::Base)).expect("base element");
        coeffs[k] = tower.one(Level::Base);
        Self::new(tower, Level::Base, coeffs).expect("valid coefficients")
    }

    pub fn level(&self) -> Level {
        self.level
    }

    pub fn coeffs(&self) -> &[FieldElement] {
        &self.coeffs
    }

    /// The q-degree, or `None` for the zero polynomial.
    pub fn q_degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeff(&self, tower: &FieldTower, i: usize) -> FieldElement {
        self.coeffs
            .get(i)
            .cloned()
            .unwrap_or_else(|| tower.zero(self.level))
    }

    /// Coefficients embedded in the top field.
    pub fn top_coeffs(&self, tower: &FieldTower) -> Result<Vec<Top>, PolyError> {
        self.coeffs
            .iter()
            .map(|c| Ok(tower.embed(c, Level::Top)?.coeffs))
            .collect()
    }

    pub fn lift(&self, tower: &FieldTower) -> Result<Self, PolyError> {
        let coeffs = self
            .top_coeffs(tower)?
            .into_iter()
            .map(FieldElement::top)
            .collect();
        Ok(LinearizedPolynomial {
            level: Level::Top,
            coeffs,
        })
    }

    /// Dense ordinary coefficients over the top field, low degree first.
    pub fn dense(&self, tower: &FieldTower) -> Result<Vec<Top>, PolyError> {
        let top = tower.top();
        let q = tower.q() as usize;
        let Some(deg) = self.q_degree() else {
            return Ok(Vec::new());
        };
        let mut out = vec![top.zero(); q.pow(deg as u32) + 1];
        for (i, c) in self.top_coeffs(tower)?.into_iter().enumerate() {
            out[q.pow(i as u32)] = c;
        }
        Ok(out)
    }
}

/// Σ aᵢ x^(qⁱ) for top-field coefficients.
pub fn eval_top(tower: &FieldTower, coeffs: &[Top], x: &Top) -> Top {
    let top = tower.top();
    let q = tower.q() as u64;
    let mut acc = top.zero();
    let mut xp = x.clone();
    for (i, a) in coeffs.iter().enumerate() {
        if !top.is_zero(a) {
            acc = top.add(&acc, &top.mul(a, &xp));
        }
        if i + 1 < coeffs.len() {
            xp = top.pow(&xp, q);
        }
    }
    acc
}

/// P(x), returned in the larger of the two levels involved.
pub fn poly_eval(
    tower: &FieldTower,
    p: &LinearizedPolynomial,
    x: &FieldElement,
) -> Result<FieldElement, PolyError> {
    let xt = tower.embed(x, Level::Top)?;
    let y = FieldElement::top(eval_top(tower, &p.top_coeffs(tower)?, &xt.coeffs));
    let level = x.level.max(p.level);
    Ok(tower.section(&y, level)?)
}

/// Roots of P in the top field GF(q^N), as a GF(q)-subspace: the kernel of
/// the GF(q)-linear map x ↦ P(x).
pub fn kernel_subspace(
    tower: &FieldTower,
    p: &LinearizedPolynomial,
) -> Result<Subspace, PolyError> {
    let coeffs = p.top_coeffs(tower)?;
    Ok(kernel_of_top(tower, &coeffs))
}

fn kernel_of_top(tower: &FieldTower, coeffs: &[Top]) -> Subspace {
    let m = tower.m();
    let images: Vec<Vec<u8>> = (0..m)
        .map(|i| {
            let mut unit = vec![0u8; m];
            unit[i] = 1;
            tower.flatten(&eval_top(tower, coeffs, &tower.unflatten(&unit)))
        })
        .collect();
    let rows = tower.scalars().kernel(&images);
    Subspace::from_rows(tower.scalars(), m, rows)
}

/// Smallest N = t·n (n the middle degree of `template`) such that P has
/// q^deg roots in GF(q^N), searching t = 1..=max_multiple. Returns N and the
/// tower realizing GF(q^N) with the same lower levels.
pub fn find_splitting_n(
    template: &FieldTower,
    p: &LinearizedPolynomial,
    max_multiple: u32,
) -> Result<(u32, Arc<FieldTower>), PolyError> {
    if p.level == Level::Top {
        return Err(PolyError::Invalid(
            "coefficients must lie below the top level".into(),
        ));
    }
    let deg = p
        .q_degree()
        .ok_or_else(|| PolyError::Invalid("zero polynomial".into()))?;
    for t in 1..=max_multiple {
        let tower = Arc::new(FieldTower::build(
            template.p(),
            template.a(),
            template.k(),
            t,
        )?);
        if kernel_subspace(&tower, p)?.dim() == deg {
            return Ok((t * template.k(), tower));
        }
    }
    Err(PolyError::NotFoundWithinBound(max_multiple * template.k()))
}

/// P_{αV}: coefficient j becomes α^(q^k − q^j)·aⱼ for a monic P of
/// q-degree k.
pub fn shift_transform(
    tower: &FieldTower,
    p: &LinearizedPolynomial,
    alpha: &Top,
) -> Result<LinearizedPolynomial, PolyError> {
    let top = tower.top();
    if top.is_zero(alpha) {
        return Err(PolyError::ZeroShift);
    }
    let coeffs = p.top_coeffs(tower)?;
    Ok(LinearizedPolynomial {
        level: Level::Top,
        coeffs: shift_coeffs(tower, &coeffs, alpha)
            .into_iter()
            .map(FieldElement::top)
            .collect(),
    })
}

fn shift_coeffs(tower: &FieldTower, coeffs: &[Top], alpha: &Top) -> Vec<Top> {
    let top = tower.top();
    let q = tower.q() as u64;
    let k = coeffs.len() as u32 - 1;
    let qk = q.pow(k);
    coeffs
        .iter()
        .enumerate()
        .map(|(j, a)| {
            if top.is_zero(a) {
                a.clone()
            } else {
                top.mul(a, &top.pow(alpha, qk - q.pow(j as u32)))
            }
        })
        .collect()
}

/// log_q of the degree of the ordinary gcd of two q-polynomials given by
/// top-field coefficients.
fn gcd_dim(tower: &FieldTower, a: &[Top], b: &[Top]) -> Result<usize, PolyError> {
    let top = tower.top();
    let dense = |c: &[Top]| {
        let q = tower.q() as usize;
        let mut out = vec![top.zero(); q.pow(c.len() as u32 - 1) + 1];
        for (i, x) in c.iter().enumerate() {
            out[q.pow(i as u32)] = x.clone();
        }
        out
    };
    let g = poly::gcd(top, &dense(a), &dense(b));
    let deg = poly::degree(&g).unwrap_or(0);
    let q = tower.q() as usize;
    let mut d = 0;
    let mut pw = 1;
    while pw < deg {
        pw *= q;
        d += 1;
    }
    if pw != deg {
        return Err(PolyError::NonPowerDegree(deg));
    }
    Ok(d)
}

/// dim(ker P ∩ ker Q) read off the degree of gcd(P, Q), for polynomials
/// with simple roots.
pub fn intersection_dim_via_gcd(
    tower: &FieldTower,
    p: &LinearizedPolynomial,
    q: &LinearizedPolynomial,
) -> Result<usize, PolyError> {
    gcd_dim(tower, &p.top_coeffs(tower)?, &q.top_coeffs(tower)?)
}

/// The monic subspace polynomial ∏_{v∈V}(x − v), built one basis vector at
/// a time through P_{V⊕⟨w⟩}(x) = P_V(x)^q − P_V(w)^(q−1)·P_V(x).
pub fn subspace_polynomial(tower: &FieldTower, v: &Subspace) -> LinearizedPolynomial {
    let top = tower.top();
    let q = tower.q() as u64;
    let mut coeffs: Vec<Top> = vec![top.one()];
    for row in v.basis() {
        let w = tower.unflatten(row);
        let c = top.pow(&eval_top(tower, &coeffs, &w), q - 1);
        let mut next = vec![top.zero(); coeffs.len() + 1];
        for (i, a) in coeffs.iter().enumerate() {
            next[i + 1] = top.add(&next[i + 1], &top.pow(a, q));
            next[i] = top.sub(&next[i], &top.mul(&c, a));
        }
        coeffs = next;
    }
    LinearizedPolynomial {
        level: Level::Top,
        coeffs: coeffs.into_iter().map(FieldElement::top).collect(),
    }
}

/// Checks the shape x^(q^k) + γ_{s+1}x^(q^(s+1)) + … + γ_0 x with γ_{s+1},
/// γ_s and γ_0 nonzero, returning k.
pub fn check_support(p: &LinearizedPolynomial, s: usize) -> Result<usize, PolyError> {
    let k = p
        .q_degree()
        .ok_or_else(|| PolyError::BadSupport("zero polynomial".into()))?;
    let is_zero = |c: &FieldElement| c.coeffs.iter().all(|&d| d == 0);
    let is_one = |c: &FieldElement| c.coeffs[0] == 1 && c.coeffs[1..].iter().all(|&d| d == 0);
    if s < 1 || s + 2 > k {
        return Err(PolyError::BadSupport(format!(
            "need 1 <= s < k - 1, got s = {s}, k = {k}"
        )));
    }
    if !is_one(&p.coeffs[k]) {
        return Err(PolyError::BadSupport("not monic".into()));
    }
    if let Some(e) = (s + 2..k).find(|&e| !is_zero(&p.coeffs[e])) {
        return Err(PolyError::BadSupport(format!(
            "nonzero coefficient at q-exponent {e}"
        )));
    }
    for e in [0, s, s + 1] {
        if is_zero(&p.coeffs[e]) {
            return Err(PolyError::BadSupport(format!(
                "coefficient at q-exponent {e} is zero"
            )));
        }
    }
    Ok(k)
}

/// The (k+1) × (k−s+1) matrix whose rank decides how large the gcd of
/// P_i and P_{αV_j} can be.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankMatrix {
    pub i: usize,
    pub j: usize,
    pub alpha: Top,
    pub rows: Vec<Vec<Top>>,
}

/// r_t = γ_{t,i} − γ_{t,j}·α^(q^k − q^t) for t = 0..=s+1.
fn r_values(
    tower: &FieldTower,
    gi: &[Top],
    gj: &[Top],
    alpha: &Top,
    k: usize,
    s: usize,
) -> Vec<Top> {
    let top = tower.top();
    let q = tower.q() as u64;
    let qk = q.pow(k as u32);
    (0..=s + 1)
        .map(|t| {
            top.sub(
                &gi[t],
                &top.mul(&gj[t], &top.pow(alpha, qk - q.pow(t as u32))),
            )
        })
        .collect()
}

fn rank_matrix_rows(
    tower: &FieldTower,
    gi: &[Top],
    gj: &[Top],
    alpha: &Top,
    s: usize,
) -> Vec<Vec<Top>> {
    let top = tower.top();
    let q = tower.q() as u64;
    let k = gi.len() - 1;
    let r = r_values(tower, gi, gj, alpha, k, s);
    let cols = k - s + 1;
    let mut rows = vec![vec![top.zero(); cols]; k + 1];
    for c in 0..cols - 1 {
        let e = (k - s - 1 - c) as u32;
        for u in 0..=s + 1 {
            rows[c + u][c] = top.pow(&r[s + 1 - u], q.pow(e));
        }
    }
    rows[0][cols - 1] = top.one();
    for d in 0..=s + 1 {
        rows[k - d][cols - 1] = gi[d].clone();
    }
    rows
}

pub fn build_rank_matrix(
    tower: &FieldTower,
    pi: &LinearizedPolynomial,
    pj: &LinearizedPolynomial,
    i: usize,
    j: usize,
    alpha: &Top,
    s: usize,
) -> Result<RankMatrix, PolyError> {
    let k = check_support(pi, s)?;
    if check_support(pj, s)? != k {
        return Err(PolyError::BadSupport("q-degrees differ".into()));
    }
    if tower.top().is_zero(alpha) {
        return Err(PolyError::ZeroShift);
    }
    let rows = rank_matrix_rows(
        tower,
        &pi.top_coeffs(tower)?,
        &pj.top_coeffs(tower)?,
        alpha,
        s,
    );
    Ok(RankMatrix {
        i,
        j,
        alpha: alpha.clone(),
        rows,
    })
}

impl RankMatrix {
    pub fn rank(&self, tower: &FieldTower) -> usize {
        rank_over(tower.top(), &self.rows)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankFailure {
    pub i: usize,
    pub j: usize,
    pub alpha: Vec<u32>,
    pub rank: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub rank_condition: bool,
    pub rank_witness: Option<RankFailure>,
    pub coefficient_condition: bool,
    pub coefficient_witness: Option<(usize, usize)>,
    pub alphas_checked: u64,
}

impl Verdict {
    pub fn passed(&self) -> bool {
        self.rank_condition && self.coefficient_condition
    }
}

struct Prepared {
    k: usize,
    coeffs: Vec<Vec<Top>>,
}

fn prepare(
    tower: &FieldTower,
    polys: &[LinearizedPolynomial],
    s: usize,
) -> Result<Prepared, PolyError> {
    if polys.is_empty() {
        return Err(PolyError::Invalid("no polynomials".into()));
    }
    let mut k = None;
    let mut coeffs = Vec::with_capacity(polys.len());
    for (index, p) in polys.iter().enumerate() {
        let d = check_support(p, s)?;
        if *k.get_or_insert(d) != d {
            return Err(PolyError::BadSupport("q-degrees differ".into()));
        }
        let found = kernel_subspace(tower, p)?.dim();
        if found != d {
            return Err(PolyError::NotSplitting {
                index,
                found,
                expected: d,
            });
        }
        coeffs.push(p.top_coeffs(tower)?);
    }
    Ok(Prepared {
        k: k.unwrap(),
        coeffs,
    })
}

fn check_budget(tower: &FieldTower, pairs: usize, budget: u64) -> Result<u64, PolyError> {
    let count = tower.projective_count();
    let needed = BigUint::from(pairs) * BigUint::from(count.unwrap_or(u64::MAX));
    match (count, u64::try_from(&needed)) {
        (Some(c), Ok(n)) if n <= budget => Ok(c),
        _ => Err(PolyError::Infeasible { needed, budget }),
    }
}

/// Every ordered pair and every projective α outside GF(q^gcd(k−s−1,N)) ∪
/// GF(q^gcd(k,N)) must give a matrix of full column rank k − s + 1.
fn rank_condition(
    tower: &FieldTower,
    prep: &Prepared,
    s: usize,
    budget: u64,
) -> Result<(Option<RankFailure>, u64), PolyError> {
    let e = prep.coeffs.len();
    let count = check_budget(tower, e * e, budget)?;
    let n = tower.m() as u32;
    let k = prep.k as u32;
    let small = [(k - s as u32 - 1).gcd(&n), k.gcd(&n)];
    let excluded: Vec<u64> = (0..count)
        .into_par_iter()
        .filter(|&a| {
            let alpha = tower.projective_rep_at(a);
            small.iter().any(|&d| tower.in_subfield(&alpha, d))
        })
        .collect();
    let want = prep.k - s + 1;
    let pairs: Vec<(usize, usize)> = (0..e).flat_map(|i| (0..e).map(move |j| (i, j))).collect();
    let failure = pairs.par_iter().find_map_first(|&(i, j)| {
        (0..count).into_par_iter().find_map_first(|a| {
            if excluded.binary_search(&a).is_ok() {
                return None;
            }
            let alpha = tower.projective_rep_at(a);
            let rows = rank_matrix_rows(tower, &prep.coeffs[i], &prep.coeffs[j], &alpha, s);
            let rank = rank_over(tower.top(), &rows);
            (rank != want).then(|| RankFailure {
                i,
                j,
                alpha: alpha.to_vec(),
                rank,
            })
        })
    });
    let checked = (count - excluded.len() as u64) * (e * e) as u64;
    Ok((failure, checked))
}

fn ratio(tower: &FieldTower, a: &Top, b: &Top) -> Top {
    let top = tower.top();
    top.mul(a, &top.inv(b).expect("nonzero"))
}

/// For i ≠ j, some h in 1..=s+1 with gcd(h, n) = 1 and both γ_h nonzero
/// has (γ0i/γ0j)^((q^h−1)/(q−1)) ≠ ((γ0i/γ0j)(γhi/γhj)⁻¹)^((q^k−1)/(q−1)),
/// n being the degree of the coefficient field.
fn coefficient_condition(tower: &FieldTower, prep: &Prepared, s: usize) -> Option<(usize, usize)> {
    let top = tower.top();
    let q = tower.q() as u64;
    let n = tower.k() as usize;
    let e = prep.coeffs.len();
    let ok = |i: usize, j: usize| {
        let (gi, gj) = (&prep.coeffs[i], &prep.coeffs[j]);
        let r0 = ratio(tower, &gi[0], &gj[0]);
        (1..=s + 1).filter(|h| h.gcd(&n) == 1).any(|h| {
            if top.is_zero(&gi[h]) || top.is_zero(&gj[h]) {
                return false;
            }
            let lhs = top.pow(&r0, (q.pow(h as u32) - 1) / (q - 1));
            let rh = ratio(tower, &gi[h], &gj[h]);
            let rhs = top.pow(
                &ratio(tower, &r0, &rh),
                (q.pow(prep.k as u32) - 1) / (q - 1),
            );
            lhs != rhs
        })
    };
    (0..e)
        .flat_map(|i| (0..e).map(move |j| (i, j)))
        .find(|&(i, j)| i != j && !ok(i, j))
}

/// Evaluates the rank condition and the coefficient condition on a set of
/// subspace polynomials over the tower's top field.
pub fn check_rank_conditions(
    tower: &FieldTower,
    polys: &[LinearizedPolynomial],
    s: usize,
    budget: u64,
) -> Result<Verdict, PolyError> {
    let prep = prepare(tower, polys, s)?;
    let (rank_witness, alphas_checked) = rank_condition(tower, &prep, s, budget)?;
    let coefficient_witness = coefficient_condition(tower, &prep, s);
    Ok(Verdict {
        rank_condition: rank_witness.is_none(),
        rank_witness,
        coefficient_condition: coefficient_witness.is_none(),
        coefficient_witness,
        alphas_checked,
    })
}

/// The binary specialization: the rank condition as before, and for i ≠ j
/// distinct γ₀ together with some h, gcd(h, n) = 1, where γ_h = γ₀ in both
/// polynomials.
pub fn check_binary_conditions(
    tower: &FieldTower,
    polys: &[LinearizedPolynomial],
    s: usize,
    budget: u64,
) -> Result<Verdict, PolyError> {
    if tower.q() != 2 {
        return Err(PolyError::WrongCharacteristic(tower.q()));
    }
    let prep = prepare(tower, polys, s)?;
    let (rank_witness, alphas_checked) = rank_condition(tower, &prep, s, budget)?;
    let n = tower.k() as usize;
    let e = prep.coeffs.len();
    let ok = |i: usize, j: usize| {
        let (gi, gj) = (&prep.coeffs[i], &prep.coeffs[j]);
        gi[0] != gj[0]
            && (1..=s + 1)
                .filter(|h| h.gcd(&n) == 1)
                .any(|h| gi[h] == gi[0] && gj[h] == gj[0])
    };
    let coefficient_witness = (0..e)
        .flat_map(|i| (0..e).map(move |j| (i, j)))
        .find(|&(i, j)| i != j && !ok(i, j));
    Ok(Verdict {
        rank_condition: rank_witness.is_none(),
        rank_witness,
        coefficient_condition: coefficient_witness.is_none(),
        coefficient_witness,
        alphas_checked,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolyCodeReport {
    #[serde(with = "crate::orbit::decimal")]
    pub size: BigUint,
    pub min_distance: Option<usize>,
    pub disjoint: bool,
    pub iterations: u64,
}

/// Exact size and minimum distance of ⋃ orb(ker Pᵢ), with every
/// intersection dimension read from gcd(Pᵢ, P_{αV_j}).
pub fn poly_code_distance(
    tower: &FieldTower,
    polys: &[LinearizedPolynomial],
    budget: u64,
) -> Result<PolyCodeReport, PolyError> {
    if polys.is_empty() {
        return Err(PolyError::Invalid("no polynomials".into()));
    }
    let mut coeffs = Vec::with_capacity(polys.len());
    let mut kernels = Vec::with_capacity(polys.len());
    for (index, p) in polys.iter().enumerate() {
        let d = p
            .q_degree()
            .ok_or_else(|| PolyError::Invalid("zero polynomial".into()))?;
        let ker = kernel_subspace(tower, p)?;
        if ker.dim() != d {
            return Err(PolyError::NotSplitting {
                index,
                found: ker.dim(),
                expected: d,
            });
        }
        coeffs.push(p.top_coeffs(tower)?);
        kernels.push(ker);
    }
    let k = kernels[0].dim();
    if kernels.iter().any(|v| v.dim() != k) {
        return Err(PolyError::Invalid("q-degrees differ".into()));
    }
    let e = polys.len();
    let pair_count = e * (e + 1) / 2;
    let count = check_budget(tower, pair_count, budget)?;
    let pairs: Vec<(usize, usize)> = (0..e).flat_map(|i| (i..e).map(move |j| (i, j))).collect();
    let per_pair: Vec<(Option<usize>, bool)> = pairs
        .par_iter()
        .map(|&(i, j)| {
            (0..count)
                .into_par_iter()
                .map(|a| {
                    let shifted = shift_coeffs(tower, &coeffs[j], &tower.projective_rep_at(a));
                    let d = gcd_dim(tower, &coeffs[i], &shifted)?;
                    Ok(if d == k {
                        (None, i != j)
                    } else {
                        (Some(2 * (k - d)), false)
                    })
                })
                .try_reduce(|| (None, false), |x, y| Ok((min_opt(x.0, y.0), x.1 || y.1)))
        })
        .collect::<Result<_, PolyError>>()?;
    let min_distance = per_pair.iter().fold(None, |acc, r| min_opt(acc, r.0));
    let disjoint = per_pair.iter().all(|r| !r.1);
    let size = kernels.iter().map(|v| v.orbit_size(tower)).sum();
    Ok(PolyCodeReport {
        size,
        min_distance,
        disjoint,
        iterations: count * pair_count as u64,
    })
}

fn min_opt(a: Option<usize>, b: Option<usize>) -> Option<usize> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, y) => x.or(y),
    }
}

/// A coefficient as written in a polynomial file: a power of ξ, or the
/// GF(q)-digits of a middle-field element, low first.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CoeffRepr {
    XiPower { xi: u64 },
    Digits(Vec<u32>),
}

/// Polynomial input: coefficients over GF(q^n) keyed by q-exponent.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolySet {
    pub q: u32,
    pub n: u32,
    pub k: usize,
    pub s: usize,
    pub polys: Vec<BTreeMap<usize, CoeffRepr>>,
}

impl PolySet {
    /// Resolves the coefficients in a tower whose middle field is GF(q^n).
    pub fn resolve(&self, tower: &FieldTower) -> Result<Vec<LinearizedPolynomial>, PolyError> {
        if tower.q() != self.q || tower.k() != self.n {
            return Err(PolyError::Invalid(format!(
                "tower has q = {}, n = {}; file has q = {}, n = {}",
                tower.q(),
                tower.k(),
                self.q,
                self.n
            )));
        }
        self.polys
            .iter()
            .map(|terms| {
                let terms = terms
                    .iter()
                    .map(|(&e, c)| {
                        let elem = match c {
                            CoeffRepr::XiPower { xi } => tower.mid_element(tower.xi_pow(*xi)),
                            CoeffRepr::Digits(d) => {
                                let x = FieldElement {
                                    level: Level::Mid,
                                    coeffs: d.iter().copied().collect(),
                                };
                                tower.validate(&x)?;
                                x
                            }
                        };
                        Ok((e, elem))
                    })
                    .collect::<Result<Vec<_>, PolyError>>()?;
                let p = LinearizedPolynomial::from_terms(tower, Level::Mid, &terms)?;
                if p.q_degree() != Some(self.k) {
                    return Err(PolyError::Invalid(format!(
                        "q-degree is not k = {}",
                        self.k
                    )));
                }
                Ok(p)
            })
            .collect()
    }
}
