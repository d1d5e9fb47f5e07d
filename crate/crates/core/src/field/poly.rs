//! Dense univariate polynomials over any [`FieldOps`] implementation.
//!
//! Coefficient vectors are stored low degree first and kept trimmed: the
//! zero polynomial is the empty vector.

use super::FieldOps;

pub type Poly<E> = Vec<E>;

pub fn trim<F: FieldOps>(f: &F, mut a: Poly<F::Elem>) -> Poly<F::Elem> {
    while a.last().is_some_and(|c| f.is_zero(c)) {
        a.pop();
    }
    a
}

/// Degree, or `None` for the zero polynomial.
pub fn degree<E>(a: &[E]) -> Option<usize> {
    a.len().checked_sub(1)
}

pub fn add<F: FieldOps>(f: &F, a: &[F::Elem], b: &[F::Elem]) -> Poly<F::Elem> {
    let n = a.len().max(b.len());
    let zero = f.zero();
    let out = (0..n)
        .map(|i| f.add(a.get(i).unwrap_or(&zero), b.get(i).unwrap_or(&zero)))
        .collect();
    trim(f, out)
}

pub fn sub<F: FieldOps>(f: &F, a: &[F::Elem], b: &[F::Elem]) -> Poly<F::Elem> {
    let n = a.len().max(b.len());
    let zero = f.zero();
    let out = (0..n)
        .map(|i| f.sub(a.get(i).unwrap_or(&zero), b.get(i).unwrap_or(&zero)))
        .collect();
    trim(f, out)
}

pub fn scale<F: FieldOps>(f: &F, a: &[F::Elem], c: &F::Elem) -> Poly<F::Elem> {
    trim(f, a.iter().map(|x| f.mul(x, c)).collect())
}

pub fn mul<F: FieldOps>(f: &F, a: &[F::Elem], b: &[F::Elem]) -> Poly<F::Elem> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![f.zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if f.is_zero(x) {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            let t = f.mul(x, y);
            out[i + j] = f.add(&out[i + j], &t);
        }
    }
    trim(f, out)
}

/// Quotient and remainder of `a` by a nonzero `b`.
pub fn divrem<F: FieldOps>(f: &F, a: &[F::Elem], b: &[F::Elem]) -> (Poly<F::Elem>, Poly<F::Elem>) {
    let db = degree(b).expect("division by the zero polynomial");
    let lead_inv = f.inv(&b[db]).expect("trimmed polynomial has nonzero lead");
    let mut rem: Vec<F::Elem> = a.to_vec();
    if rem.len() <= db {
        return (Vec::new(), trim(f, rem));
    }
    let mut quot = vec![f.zero(); rem.len() - db];
    for i in (db..rem.len()).rev() {
        if f.is_zero(&rem[i]) {
            continue;
        }
        let c = f.mul(&rem[i], &lead_inv);
        for (j, bj) in b.iter().enumerate() {
            let t = f.mul(&c, bj);
            rem[i - db + j] = f.sub(&rem[i - db + j], &t);
        }
        quot[i - db] = c;
    }
    rem.truncate(db);
    (trim(f, quot), trim(f, rem))
}

pub fn rem<F: FieldOps>(f: &F, a: &[F::Elem], b: &[F::Elem]) -> Poly<F::Elem> {
    divrem(f, a, b).1
}

pub fn make_monic<F: FieldOps>(f: &F, a: Poly<F::Elem>) -> Poly<F::Elem> {
    match a.last() {
        None => a,
        Some(lead) => {
            let inv = f.inv(lead).expect("nonzero lead");
            scale(f, &a, &inv)
        }
    }
}

/// Monic greatest common divisor (zero if both inputs are zero).
pub fn gcd<F: FieldOps>(f: &F, a: &[F::Elem], b: &[F::Elem]) -> Poly<F::Elem> {
    let mut x = trim(f, a.to_vec());
    let mut y = trim(f, b.to_vec());
    while !y.is_empty() {
        let r = rem(f, &x, &y);
        x = y;
        y = r;
    }
    make_monic(f, x)
}

/// Returns `(g, s)` with `g = gcd(a, m)` monic and `s·a ≡ g (mod m)`.
pub fn ext_gcd<F: FieldOps>(f: &F, a: &[F::Elem], m: &[F::Elem]) -> (Poly<F::Elem>, Poly<F::Elem>) {
    let mut r0 = trim(f, m.to_vec());
    let mut r1 = trim(f, a.to_vec());
    let mut s0: Poly<F::Elem> = Vec::new();
    let mut s1: Poly<F::Elem> = vec![f.one()];
    while !r1.is_empty() {
        let (q, r) = divrem(f, &r0, &r1);
        let s2 = sub(f, &s0, &mul(f, &q, &s1));
        r0 = std::mem::replace(&mut r1, r);
        s0 = std::mem::replace(&mut s1, s2);
    }
    match r0.last() {
        None => (r0, s0),
        Some(lead) => {
            let inv = f.inv(lead).expect("nonzero lead");
            (scale(f, &r0, &inv), scale(f, &s0, &inv))
        }
    }
}

pub fn mulmod<F: FieldOps>(f: &F, a: &[F::Elem], b: &[F::Elem], m: &[F::Elem]) -> Poly<F::Elem> {
    rem(f, &mul(f, a, b), m)
}

pub fn powmod<F: FieldOps>(f: &F, base: &[F::Elem], mut e: u64, m: &[F::Elem]) -> Poly<F::Elem> {
    let mut acc = rem(f, &[f.one()], m);
    let mut b = rem(f, base, m);
    while e > 0 {
        if e & 1 == 1 {
            acc = mulmod(f, &acc, &b, m);
        }
        e >>= 1;
        if e > 0 {
            b = mulmod(f, &b, &b, m);
        }
    }
    acc
}

/// Ben-Or irreducibility test for a monic `m` over a field with `field_order`
/// elements: `gcd(x^(Q^i) - x, m) = 1` for every `i <= deg(m)/2`.
pub fn is_irreducible<F: FieldOps>(f: &F, field_order: u64, m: &[F::Elem]) -> bool {
    let Some(d) = degree(m) else { return false };
    if d == 0 {
        return false;
    }
    if d == 1 {
        return true;
    }
    let x = vec![f.zero(), f.one()];
    let mut h = x.clone();
    for _ in 0..d / 2 {
        h = powmod(f, &h, field_order, m);
        let g = gcd(f, &sub(f, &h, &x), m);
        if degree(&g) != Some(0) {
            return false;
        }
    }
    true
}

pub fn eval<F: FieldOps>(f: &F, a: &[F::Elem], x: &F::Elem) -> F::Elem {
    a.iter()
        .rev()
        .fold(f.zero(), |acc, c| f.add(&f.mul(&acc, x), c))
}
