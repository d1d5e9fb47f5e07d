//! Table-driven arithmetic for the small levels of a tower.
//!
//! An element is an index `Σ cᵢ·Bⁱ` where `cᵢ` are its coefficients over the
//! level below (of size `B`). Because every level is built the same way, the
//! index is also the base-`p` expansion of the flattened GF(p) coordinates,
//! so addition is digit-wise mod `p` at every level.

use super::factor::{distinct_prime_factors, is_prime};
use super::{FieldError, FieldOps};

/// Largest field that gets log/antilog tables.
pub const MAX_TABLE_ORDER: u64 = 1 << 22;
const ADD_TABLE_ORDER: u32 = 256;

#[derive(Clone, Debug)]
pub struct SmallField {
    p: u32,
    order: u32,
    sub_order: u32,
    degree: u32,
    flat_degree: u32,
    modulus: Vec<u32>,
    generator: u32,
    // exp has length 2·(order−1) so products of logs need no reduction
    exp: Vec<u32>,
    log: Vec<u32>,
    add_table: Option<Vec<u32>>,
}

impl SmallField {
    /// GF(p) with the first primitive residue as generator.
    pub fn prime(p: u32) -> Result<Self, FieldError> {
        if !is_prime(p as u64) {
            return Err(FieldError::NotPrime(p as u64));
        }
        let mul = |x: u32, y: u32| ((x as u64 * y as u64) % p as u64) as u32;
        let factors = distinct_prime_factors(p as u64 - 1);
        let generator = (1..p)
            .find(|&g| {
                factors
                    .iter()
                    .all(|&l| slow_pow(g, (p as u64 - 1) / l, &mul) != 1)
            })
            .ok_or(FieldError::SearchExhausted("primitive root of GF(p)"))?;
        Self::with_tables(p, p, p, 1, 1, Vec::new(), generator, &mul)
    }

    /// The extension `sub[y]/(modulus)` for a monic `modulus` (low degree
    /// first). The generator is the first element in lexicographic
    /// coefficient order with full multiplicative order; none exists when the
    /// modulus is reducible, which is reported as `SearchExhausted`.
    pub fn extension(sub: &SmallField, modulus: &[u32]) -> Result<Self, FieldError> {
        let degree = modulus
            .len()
            .checked_sub(1)
            .filter(|&d| d >= 1)
            .ok_or_else(|| {
                FieldError::InvalidParameter("defining polynomial must have degree >= 1".into())
            })?;
        if modulus[degree] != 1 {
            return Err(FieldError::InvalidParameter(
                "defining polynomial must be monic".into(),
            ));
        }
        let order = (sub.order as u64)
            .checked_pow(degree as u32)
            .filter(|&o| o <= MAX_TABLE_ORDER)
            .ok_or(FieldError::TooLarge)? as u32;
        let b = sub.order;
        let mul = |x: u32, y: u32| -> u32 {
            let xs = digits(x, b, degree);
            let ys = digits(y, b, degree);
            let prod = super::poly::mul(sub, &xs, &ys);
            let r = super::poly::rem(sub, &prod, modulus);
            undigits(&r, b)
        };
        let factors = distinct_prime_factors(order as u64 - 1);
        let generator = (1..order)
            .map(|n| lex_nth(n, b, degree))
            .find(|&g| {
                slow_pow(g, order as u64 - 1, &mul) == 1
                    && factors
                        .iter()
                        .all(|&l| slow_pow(g, (order as u64 - 1) / l, &mul) != 1)
            })
            .ok_or(FieldError::SearchExhausted("primitive element"))?;
        Self::with_tables(
            sub.p,
            order,
            b,
            degree as u32,
            sub.flat_degree * degree as u32,
            modulus.to_vec(),
            generator,
            &mul,
        )
    }

    #[allow(clippy::too_many_arguments)]
    fn with_tables(
        p: u32,
        order: u32,
        sub_order: u32,
        degree: u32,
        flat_degree: u32,
        modulus: Vec<u32>,
        generator: u32,
        mul: &dyn Fn(u32, u32) -> u32,
    ) -> Result<Self, FieldError> {
        let n = (order - 1) as usize;
        let mut exp = vec![0u32; 2 * n];
        let mut log = vec![u32::MAX; order as usize];
        let mut cur = 1u32;
        for i in 0..n {
            if log[cur as usize] != u32::MAX {
                return Err(FieldError::SearchExhausted("generator cycle"));
            }
            exp[i] = cur;
            exp[i + n] = cur;
            log[cur as usize] = i as u32;
            cur = mul(cur, generator);
        }
        if cur != 1 {
            return Err(FieldError::SearchExhausted("generator cycle"));
        }
        let mut field = SmallField {
            p,
            order,
            sub_order,
            degree,
            flat_degree,
            modulus,
            generator,
            exp,
            log,
            add_table: None,
        };
        if p != 2 && order <= ADD_TABLE_ORDER {
            let mut table = vec![0u32; (order * order) as usize];
            for x in 0..order {
                for y in 0..order {
                    table[(x * order + y) as usize] = field.add_digits(x, y);
                }
            }
            field.add_table = Some(table);
        }
        Ok(field)
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    /// Size of the level this field is built over.
    pub fn sub_order(&self) -> u32 {
        self.sub_order
    }

    /// Degree over the level below.
    pub fn degree(&self) -> u32 {
        self.degree
    }

    /// Degree over the prime field.
    pub fn flat_degree(&self) -> u32 {
        self.flat_degree
    }

    /// Defining polynomial over the level below (empty for a prime field).
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    /// The primitive element used for the tables.
    pub fn generator(&self) -> u32 {
        self.generator
    }

    /// Discrete log to the base of [`Self::generator`].
    pub fn log(&self, x: u32) -> Option<u32> {
        (x != 0).then(|| self.log[x as usize])
    }

    /// `generator^e`.
    pub fn exp(&self, e: u64) -> u32 {
        self.exp[(e % (self.order as u64 - 1)) as usize]
    }

    /// Coefficients over the level below.
    pub fn coeffs(&self, x: u32) -> Vec<u32> {
        digits(x, self.sub_order, self.degree as usize)
    }

    pub fn from_coeffs(&self, coeffs: &[u32]) -> u32 {
        undigits(coeffs, self.sub_order)
    }

    fn add_digits(&self, mut x: u32, mut y: u32) -> u32 {
        let p = self.p;
        let mut out = 0u32;
        let mut place = 1u32;
        for _ in 0..self.flat_degree {
            out += ((x % p + y % p) % p) * place;
            x /= p;
            y /= p;
            place = place.wrapping_mul(p);
        }
        out
    }

    fn neg_digits(&self, mut x: u32) -> u32 {
        let p = self.p;
        let mut out = 0u32;
        let mut place = 1u32;
        for _ in 0..self.flat_degree {
            out += ((p - x % p) % p) * place;
            x /= p;
            place = place.wrapping_mul(p);
        }
        out
    }

    #[inline]
    pub fn add(&self, x: u32, y: u32) -> u32 {
        if self.p == 2 {
            x ^ y
        } else if let Some(t) = &self.add_table {
            t[(x * self.order + y) as usize]
        } else {
            self.add_digits(x, y)
        }
    }

    #[inline]
    pub fn neg(&self, x: u32) -> u32 {
        if self.p == 2 {
            x
        } else {
            self.neg_digits(x)
        }
    }

    #[inline]
    pub fn sub(&self, x: u32, y: u32) -> u32 {
        self.add(x, self.neg(y))
    }

    #[inline]
    pub fn mul(&self, x: u32, y: u32) -> u32 {
        if x == 0 || y == 0 {
            0
        } else {
            self.exp[(self.log[x as usize] + self.log[y as usize]) as usize]
        }
    }

    #[inline]
    pub fn inv(&self, x: u32) -> Option<u32> {
        if x == 0 {
            None
        } else {
            let n = self.order - 1;
            Some(self.exp[((n - self.log[x as usize]) % n) as usize])
        }
    }

    pub fn pow(&self, x: u32, e: u64) -> u32 {
        if e == 0 {
            return 1;
        }
        if x == 0 {
            return 0;
        }
        let n = (self.order - 1) as u64;
        let l = (self.log[x as usize] as u64 * (e % n)) % n;
        self.exp[l as usize]
    }

    /// Multiplicative order of a nonzero element.
    pub fn element_order(&self, x: u32) -> Option<u64> {
        let l = self.log(x)? as u64;
        let n = self.order as u64 - 1;
        Some(n / super::factor::gcd(l, n))
    }
}

impl FieldOps for SmallField {
    type Elem = u32;

    fn zero(&self) -> u32 {
        0
    }
    fn one(&self) -> u32 {
        1
    }
    fn is_zero(&self, x: &u32) -> bool {
        *x == 0
    }
    fn add(&self, x: &u32, y: &u32) -> u32 {
        SmallField::add(self, *x, *y)
    }
    fn sub(&self, x: &u32, y: &u32) -> u32 {
        SmallField::sub(self, *x, *y)
    }
    fn neg(&self, x: &u32) -> u32 {
        SmallField::neg(self, *x)
    }
    fn mul(&self, x: &u32, y: &u32) -> u32 {
        SmallField::mul(self, *x, *y)
    }
    fn inv(&self, x: &u32) -> Option<u32> {
        SmallField::inv(self, *x)
    }
}

/// Base-`b` digits of `x`, least significant first, padded to `len`.
pub fn digits(mut x: u32, b: u32, len: usize) -> Vec<u32> {
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        out.push(x % b);
        x /= b;
    }
    out
}

pub fn undigits(ds: &[u32], b: u32) -> u32 {
    ds.iter().rev().fold(0, |acc, &d| acc * b + d)
}

/// The `n`-th coefficient vector of length `len` over an alphabet of size
/// `b` in lexicographic order (c₀ most significant), returned as an index.
pub fn lex_nth(n: u32, b: u32, len: usize) -> u32 {
    let mut ds = digits(n, b, len);
    ds.reverse();
    undigits(&ds, b)
}

fn slow_pow(x: u32, mut e: u64, mul: &dyn Fn(u32, u32) -> u32) -> u32 {
    let mut acc = 1u32;
    let mut b = x;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul(acc, b);
        }
        e >>= 1;
        if e > 0 {
            b = mul(b, b);
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gf4_generator_is_y() {
        let f2 = SmallField::prime(2).unwrap();
        let f4 = SmallField::extension(&f2, &[1, 1, 1]).unwrap();
        assert_eq!(f4.generator(), 2);
        assert_eq!(f4.mul(2, 2), 3);
        assert_eq!(f4.mul(2, 3), 1);
    }

    #[test]
    fn reducible_modulus_is_rejected() {
        let f3 = SmallField::prime(3).unwrap();
        // y^2 - 1 = (y-1)(y+1)
        assert!(SmallField::extension(&f3, &[2, 0, 1]).is_err());
    }

    #[test]
    fn gf9_tables_are_consistent() {
        let f3 = SmallField::prime(3).unwrap();
        let f9 = SmallField::extension(&f3, &[1, 0, 1]).unwrap();
        for x in 0..9 {
            for y in 0..9 {
                assert_eq!(f9.sub(f9.add(x, y), y), x);
                if y != 0 {
                    assert_eq!(f9.mul(f9.mul(x, y), f9.inv(y).unwrap()), x);
                }
            }
        }
        assert_eq!(f9.element_order(f9.generator()), Some(8));
    }

    #[test]
    fn lex_order_puts_first_coefficient_most_significant() {
        assert_eq!(lex_nth(1, 2, 2), 2);
        assert_eq!(lex_nth(2, 2, 2), 1);
        assert_eq!(lex_nth(3, 2, 2), 3);
    }
}
