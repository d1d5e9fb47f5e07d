//! GF(q)-subspaces of the top field, kept as RREF bases of flattened
//! coordinate vectors so that equality of subspaces is equality of data.

use std::collections::HashSet;

use num_bigint::BigUint;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::{FieldElement, FieldTower, Level, Top};
use crate::linalg::Scalars;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SubspaceError {
    #[error("the spanned space is zero")]
    EmptyInput,
    #[error("ambient dimensions differ: {0} vs {1}")]
    AmbientMismatch(usize, usize),
    #[error("cannot shift by zero")]
    ZeroShift,
    #[error("basis is not in reduced row-echelon form: {0}")]
    NotCanonical(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Subspace {
    ambient_dim: usize,
    dim: usize,
    basis: Vec<Vec<u8>>,
}

impl Subspace {
    /// Row space of `rows` (each of length `ambient_dim`).
    pub fn from_rows(scalars: &Scalars, ambient_dim: usize, rows: Vec<Vec<u8>>) -> Self {
        debug_assert!(rows.iter().all(|r| r.len() == ambient_dim));
        let basis = scalars.rref(rows);
        Subspace {
            ambient_dim,
            dim: basis.len(),
            basis,
        }
    }

    /// GF(q)-span of top-field elements.
    pub fn span(tower: &FieldTower, elems: &[Top]) -> Self {
        let rows = elems.iter().map(|x| tower.flatten(x)).collect();
        Self::from_rows(tower.scalars(), tower.m(), rows)
    }

    /// Like [`Self::span`] but rejects the zero space.
    pub fn span_nonzero(tower: &FieldTower, elems: &[Top]) -> Result<Self, SubspaceError> {
        let s = Self::span(tower, elems);
        if s.dim == 0 {
            Err(SubspaceError::EmptyInput)
        } else {
            Ok(s)
        }
    }

    /// Checks a deserialized value: shape, digit range, full rank and RREF.
    pub fn validate(&self, scalars: &Scalars) -> Result<(), SubspaceError> {
        let bad = |m: String| Err(SubspaceError::NotCanonical(m));
        if self.basis.len() != self.dim {
            return bad(format!(
                "{} rows for dimension {}",
                self.basis.len(),
                self.dim
            ));
        }
        if self.dim > self.ambient_dim {
            return bad("dimension exceeds ambient dimension".into());
        }
        for row in &self.basis {
            if row.len() != self.ambient_dim {
                return bad(format!("row of length {}", row.len()));
            }
            if row.iter().any(|&c| c as usize >= scalars.q()) {
                return bad("digit out of range".into());
            }
        }
        if scalars.rref(self.basis.clone()) != self.basis {
            return bad("rows are rank deficient or not reduced".into());
        }
        Ok(())
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn basis(&self) -> &[Vec<u8>] {
        &self.basis
    }

    /// Basis vectors as top-field elements.
    pub fn elements(&self, tower: &FieldTower) -> Vec<Top> {
        self.basis.iter().map(|r| tower.unflatten(r)).collect()
    }

    /// One normalized representative of every projective point of the
    /// subspace: (q^dim − 1)/(q − 1) elements whose first nonzero coordinate
    /// is 1.
    pub fn points(&self, tower: &FieldTower) -> Vec<Top> {
        let s = tower.scalars();
        let q = s.q();
        let mut out = Vec::new();
        for lead in 0..self.dim {
            let tail = self.dim - lead - 1;
            let count = q.pow(tail as u32);
            for n in 0..count {
                let mut v = self.basis[lead].clone();
                let mut rest = n;
                for row in &self.basis[lead + 1..] {
                    s.axpy(&mut v, (rest % q) as u8, row);
                    rest /= q;
                }
                out.push(tower.unflatten(&v));
            }
        }
        out
    }

    fn check_ambient(&self, other: &Subspace) -> Result<(), SubspaceError> {
        if self.ambient_dim != other.ambient_dim {
            Err(SubspaceError::AmbientMismatch(
                self.ambient_dim,
                other.ambient_dim,
            ))
        } else {
            Ok(())
        }
    }

    /// dim(U ∩ V) = dim U + dim V − rank of the stacked bases.
    pub fn intersection_dim(
        &self,
        other: &Subspace,
        scalars: &Scalars,
    ) -> Result<usize, SubspaceError> {
        self.check_ambient(other)?;
        Ok(self.intersection_dim_rows(&other.basis, scalars))
    }

    /// Intersection dimension with the span of `rows`, which must be
    /// linearly independent.
    pub fn intersection_dim_rows(&self, rows: &[Vec<u8>], scalars: &Scalars) -> usize {
        let mut stacked = self.basis.clone();
        stacked.extend_from_slice(rows);
        self.dim + rows.len() - scalars.rank(&stacked)
    }

    /// The subspace distance dim U + dim V − 2 dim(U ∩ V).
    pub fn distance(&self, other: &Subspace, scalars: &Scalars) -> Result<usize, SubspaceError> {
        let i = self.intersection_dim(other, scalars)?;
        Ok(self.dim + other.dim - 2 * i)
    }

    /// Coordinates of α·b for every basis vector b; a basis of αU.
    pub fn shifted_rows(&self, tower: &FieldTower, alpha: &Top) -> Vec<Vec<u8>> {
        let top = tower.top();
        self.basis
            .iter()
            .map(|r| tower.flatten(&top.mul(&tower.unflatten(r), alpha)))
            .collect()
    }

    /// The cyclic shift αU.
    pub fn shift(&self, tower: &FieldTower, alpha: &Top) -> Result<Subspace, SubspaceError> {
        if tower.top().is_zero(alpha) {
            return Err(SubspaceError::ZeroShift);
        }
        Ok(Self::from_rows(
            tower.scalars(),
            self.ambient_dim,
            self.shifted_rows(tower, alpha),
        ))
    }

    /// Largest d such that U is GF(q^d)-linear, tested by closure under a
    /// generator of GF(q^d). Only divisors of gcd(dim, m) can qualify.
    pub fn linearity_field(&self, tower: &FieldTower) -> u32 {
        let s = tower.scalars();
        tower
            .subfield_generators()
            .iter()
            .rev()
            .filter(|(d, _)| self.dim.is_multiple_of(*d as usize))
            .find(|(_, g)| self.intersection_dim_rows(&self.shifted_rows(tower, g), s) == self.dim)
            .map_or(1, |(d, _)| *d)
    }

    /// |orb(U)| = (q^m − 1)/(q^d − 1) with d the linearity field degree.
    pub fn orbit_size(&self, tower: &FieldTower) -> BigUint {
        let d = self.linearity_field(tower);
        let q = BigUint::from(tower.q());
        (q.pow(tower.m() as u32) - 1u32) / (q.pow(d) - 1u32)
    }

    /// All distinct shifts αU, by direct enumeration over projective α.
    pub fn orbit(&self, tower: &FieldTower) -> HashSet<Subspace> {
        let count = tower
            .projective_count()
            .expect("orbit too large to enumerate");
        (0..count)
            .into_par_iter()
            .map(|n| {
                self.shift(tower, &tower.projective_rep_at(n))
                    .expect("representatives are nonzero")
            })
            .collect()
    }

    /// max dim(U ∩ αU) over projective α with αU ≠ U, or `None` when every
    /// shift fixes U.
    pub fn max_shift_intersection(&self, tower: &FieldTower) -> Option<usize> {
        max_cross_intersection(tower, self, self)
    }
}

/// max dim(U ∩ αV) over projective α, skipping α with αV = U.
pub fn max_cross_intersection(tower: &FieldTower, u: &Subspace, v: &Subspace) -> Option<usize> {
    let count = tower.projective_count().expect("scan too large");
    let s = tower.scalars();
    (0..count)
        .into_par_iter()
        .filter_map(|n| {
            let rows = v.shifted_rows(tower, &tower.projective_rep_at(n));
            let i = u.intersection_dim_rows(&rows, s);
            (!(i == u.dim && u.dim == v.dim)).then_some(i)
        })
        .max()
}

/// Representatives of (F \ {0})/GF(q)* for a tower level, each with first
/// nonzero GF(q)-coordinate equal to 1. The prime and scalar levels have the
/// single representative 1.
pub fn projective_reps(
    tower: &FieldTower,
    level: Level,
) -> Box<dyn Iterator<Item = FieldElement> + '_> {
    match level {
        Level::Prime | Level::Base => Box::new(std::iter::once(tower.one(level))),
        Level::Mid => {
            let q = tower.q();
            Box::new(
                (1..tower.mid().order())
                    .filter(move |&x| {
                        let mut x = x;
                        while x % q == 0 {
                            x /= q;
                        }
                        x % q == 1
                    })
                    .map(move |x| tower.mid_element(x)),
            )
        }
        Level::Top => Box::new(
            (0..tower.projective_count().expect("too many representatives"))
                .map(move |n| FieldElement::top(tower.projective_rep_at(n))),
        ),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::sync::OnceLock;

    fn tower_2_2_5() -> &'static FieldTower {
        static T: OnceLock<FieldTower> = OnceLock::new();
        T.get_or_init(|| FieldTower::build(2, 1, 2, 5).unwrap())
    }

    fn tower_3_1_4() -> &'static FieldTower {
        static T: OnceLock<FieldTower> = OnceLock::new();
        T.get_or_init(|| FieldTower::build(3, 1, 1, 4).unwrap())
    }

    /// F_{q^k} embedded as the constants of the top field.
    fn mid_subfield(t: &FieldTower) -> Subspace {
        let elems: Vec<Top> = (0..t.mid().order()).map(|c| t.top().constant(c)).collect();
        Subspace::span(t, &elems)
    }

    #[test]
    fn span_examples() {
        let t = tower_2_2_5();
        let one = t.top().one();
        let xi = t.top().constant(t.xi());
        assert_eq!(Subspace::span(t, &[one.clone(), xi]).dim(), 2);
        assert_eq!(mid_subfield(t).dim(), 2);
        let t3 = tower_3_1_4();
        let g = t3.gamma();
        let two_g = t3.top().scale(&g, 2);
        assert_eq!(Subspace::span(t3, &[g, two_g]).dim(), 1);
        assert_eq!(
            Subspace::span_nonzero(t, &[t.top().zero()]).unwrap_err(),
            SubspaceError::EmptyInput
        );
    }

    #[test]
    fn subfield_orbit() {
        let t = tower_2_2_5();
        let f = mid_subfield(t);
        let g = f.shift(t, &t.gamma()).unwrap();
        assert_eq!(f.intersection_dim(&g, t.scalars()).unwrap(), 0);
        assert_eq!(f.distance(&g, t.scalars()).unwrap(), 4);
        assert_eq!(f.linearity_field(t), 2);
        assert_eq!(f.orbit_size(t), BigUint::from(341u32));
        assert_eq!(f.orbit(t).len(), 341);
        assert_eq!(f.max_shift_intersection(t), Some(0));
    }

    #[test]
    fn shifts_by_scalars_and_inverses() {
        let t = tower_3_1_4();
        let u = Subspace::span(
            t,
            &[
                t.gamma(),
                t.top().add(&t.top().one(), &t.top().square(&t.gamma())),
            ],
        );
        assert_eq!(u.shift(t, &t.top().one()).unwrap(), u);
        assert_eq!(u.shift(t, &t.top().constant(2)).unwrap(), u);
        let a = t.projective_rep_at(17);
        let back = u
            .shift(t, &a)
            .unwrap()
            .shift(t, &t.top().inv(&a).unwrap())
            .unwrap();
        assert_eq!(back, u);
        assert_eq!(
            u.shift(t, &t.top().zero()).unwrap_err(),
            SubspaceError::ZeroShift
        );
        let one_dim = Subspace::span(t, &[t.gamma()]);
        assert_eq!(one_dim.linearity_field(t), 1);
    }

    #[test]
    fn projective_rep_counts() {
        let t = FieldTower::build(2, 1, 2, 1).unwrap();
        assert_eq!(projective_reps(&t, Level::Mid).count(), 3);
        assert_eq!(projective_reps(&t, Level::Top).count(), 3);
        let t9 = FieldTower::build(3, 1, 2, 1).unwrap();
        assert_eq!(projective_reps(&t9, Level::Mid).count(), 4);
        assert_eq!(projective_reps(tower_2_2_5(), Level::Top).count(), 1023);
    }

    #[test]
    fn validate_rejects_non_canonical_bases() {
        let t = tower_2_2_5();
        let u = mid_subfield(t);
        assert!(u.validate(t.scalars()).is_ok());
        let mut bad = u.clone();
        bad.basis.swap(0, 1);
        assert!(bad.validate(t.scalars()).is_err());
        let json = serde_json::to_string(&u).unwrap();
        let back: Subspace = serde_json::from_str(&json).unwrap();
        assert_eq!(back, u);
    }

    fn arb_subspace() -> impl Strategy<Value = Subspace> {
        proptest::collection::vec(proptest::collection::vec(0u8..3, 4), 1..4).prop_map(|rows| {
            let t = tower_3_1_4();
            Subspace::from_rows(t.scalars(), 4, rows)
        })
    }

    proptest! {
        #[test]
        fn metric_axioms(u in arb_subspace(), v in arb_subspace(), w in arb_subspace()) {
            let s = tower_3_1_4().scalars();
            let duv = u.distance(&v, s).unwrap();
            prop_assert_eq!(duv, v.distance(&u, s).unwrap());
            prop_assert_eq!(duv == 0, u == v);
            prop_assert!(duv <= u.distance(&w, s).unwrap() + w.distance(&v, s).unwrap());
        }

        #[test]
        fn rref_is_canonical(rows in proptest::collection::vec(
            proptest::collection::vec(0u8..3, 4), 1..4), perm_seed in 0usize..24, c in 1u8..3) {
            let t = tower_3_1_4();
            let u = Subspace::from_rows(t.scalars(), 4, rows.clone());
            let mut other = rows;
            let len = other.len();
            other.rotate_left(perm_seed % len);
            for r in other.iter_mut() {
                t.scalars().scale(r, c);
            }
            prop_assert_eq!(Subspace::from_rows(t.scalars(), 4, other), u);
        }

        #[test]
        fn shift_intersection_is_scalar_invariant(
            rows in proptest::collection::vec(proptest::collection::vec(0u8..2, 10), 2..3),
            n in 0u64..1023,
        ) {
            let t = tower_2_2_5();
            let u = Subspace::from_rows(t.scalars(), 10, rows);
            let a = t.projective_rep_at(n);
            let ua = u.shift(t, &a).unwrap();
            let t3 = tower_3_1_4();
            let v = Subspace::span(t3, &[t3.gamma(), t3.top().one()]);
            let b = t3.projective_rep_at(n % 40);
            let b2 = t3.top().scale(&b, 2);
            prop_assert_eq!(
                v.intersection_dim(&v.shift(t3, &b).unwrap(), t3.scalars()).unwrap(),
                v.intersection_dim(&v.shift(t3, &b2).unwrap(), t3.scalars()).unwrap()
            );
            prop_assert_eq!(ua.dim(), u.dim());
        }

        #[test]
        fn orbit_size_matches_enumeration(
            rows in proptest::collection::vec(proptest::collection::vec(0u8..3, 4), 1..4),
        ) {
            let t = tower_3_1_4();
            let u = Subspace::from_rows(t.scalars(), 4, rows);
            prop_assume!(u.dim() > 0);
            prop_assert_eq!(BigUint::from(u.orbit(t).len()), u.orbit_size(t));
        }
    }
}
