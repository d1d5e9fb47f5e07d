//! The top level GF(q^m) = GF(q^k)[γ]/(f), elements stored in the basis
//! 1, γ, …, γ^(t−1) over the middle field.

use std::sync::Arc;

use num_bigint::BigUint;
use smallvec::SmallVec;

use super::small::SmallField;
use super::{poly, FieldOps};

/// Coefficients over the middle field, one per power of γ.
pub type Top = SmallVec<[u32; 8]>;

#[derive(Clone, Debug)]
pub struct TopField {
    mid: Arc<SmallField>,
    t: usize,
    modulus: Vec<u32>,
}

impl TopField {
    pub(crate) fn new(mid: Arc<SmallField>, modulus: Vec<u32>) -> Self {
        let t = modulus.len() - 1;
        TopField { mid, t, modulus }
    }

    pub fn mid(&self) -> &SmallField {
        &self.mid
    }

    /// Degree over the middle field.
    pub fn t(&self) -> usize {
        self.t
    }

    /// Monic defining polynomial over the middle field, low degree first.
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn zero(&self) -> Top {
        SmallVec::from_elem(0, self.t)
    }

    pub fn one(&self) -> Top {
        self.constant(1)
    }

    /// Embeds a middle-field element.
    pub fn constant(&self, c: u32) -> Top {
        let mut x = self.zero();
        x[0] = c;
        x
    }

    /// The distinguished root γ of the defining polynomial.
    pub fn gamma(&self) -> Top {
        if self.t == 1 {
            // f(x) = x + c0, so γ = −c0
            return self.constant(self.mid.neg(self.modulus[0]));
        }
        let mut x = self.zero();
        x[1] = 1;
        x
    }

    pub fn is_zero(&self, x: &Top) -> bool {
        x.iter().all(|&c| c == 0)
    }

    pub fn add(&self, x: &Top, y: &Top) -> Top {
        x.iter().zip(y).map(|(&a, &b)| self.mid.add(a, b)).collect()
    }

    pub fn sub(&self, x: &Top, y: &Top) -> Top {
        x.iter().zip(y).map(|(&a, &b)| self.mid.sub(a, b)).collect()
    }

    pub fn neg(&self, x: &Top) -> Top {
        x.iter().map(|&a| self.mid.neg(a)).collect()
    }

    /// Multiplies by a middle-field scalar.
    pub fn scale(&self, x: &Top, c: u32) -> Top {
        x.iter().map(|&a| self.mid.mul(a, c)).collect()
    }

    pub fn mul(&self, x: &Top, y: &Top) -> Top {
        let t = self.t;
        let mid = &*self.mid;
        let mut prod: SmallVec<[u32; 16]> = SmallVec::from_elem(0, 2 * t - 1);
        for (i, &a) in x.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in y.iter().enumerate() {
                if b != 0 {
                    prod[i + j] = mid.add(prod[i + j], mid.mul(a, b));
                }
            }
        }
        for i in (t..2 * t - 1).rev() {
            let c = prod[i];
            if c == 0 {
                continue;
            }
            for j in 0..t {
                let m = self.modulus[j];
                if m != 0 {
                    prod[i - t + j] = mid.sub(prod[i - t + j], mid.mul(c, m));
                }
            }
        }
        prod.truncate(t);
        prod.into_iter().collect()
    }

    pub fn square(&self, x: &Top) -> Top {
        self.mul(x, x)
    }

    pub fn inv(&self, x: &Top) -> Option<Top> {
        if self.is_zero(x) {
            return None;
        }
        if self.t == 1 {
            return self.mid.inv(x[0]).map(|c| self.constant(c));
        }
        let a = poly::trim(&*self.mid, x.to_vec());
        let (g, s) = poly::ext_gcd(&*self.mid, &a, &self.modulus);
        debug_assert_eq!(g, vec![1]);
        let mut out = self.zero();
        for (i, c) in s.into_iter().enumerate() {
            out[i] = c;
        }
        Some(out)
    }

    pub fn pow(&self, x: &Top, mut e: u64) -> Top {
        let mut acc = self.one();
        let mut b = x.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &b);
            }
            e >>= 1;
            if e > 0 {
                b = self.square(&b);
            }
        }
        acc
    }

    pub fn pow_big(&self, x: &Top, e: &BigUint) -> Top {
        let mut acc = self.one();
        for i in (0..e.bits()).rev() {
            acc = self.square(&acc);
            if e.bit(i) {
                acc = self.mul(&acc, x);
            }
        }
        acc
    }
}

impl FieldOps for TopField {
    type Elem = Top;

    fn zero(&self) -> Top {
        TopField::zero(self)
    }
    fn one(&self) -> Top {
        TopField::one(self)
    }
    fn is_zero(&self, x: &Top) -> bool {
        TopField::is_zero(self, x)
    }
    fn add(&self, x: &Top, y: &Top) -> Top {
        TopField::add(self, x, y)
    }
    fn sub(&self, x: &Top, y: &Top) -> Top {
        TopField::sub(self, x, y)
    }
    fn neg(&self, x: &Top) -> Top {
        TopField::neg(self, x)
    }
    fn mul(&self, x: &Top, y: &Top) -> Top {
        TopField::mul(self, x, y)
    }
    fn inv(&self, x: &Top) -> Option<Top> {
        TopField::inv(self, x)
    }
}
