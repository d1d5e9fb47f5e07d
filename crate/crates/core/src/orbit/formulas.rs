//! Closed-form code sizes, bounds and rates, all in exact arithmetic.

use num_bigint::BigUint;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::OrbitError;
use crate::sidon::{extra_l_count, Parity};

/// Which closed-form union size to evaluate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Theorem {
    /// n = (2r+1)k, union of both odd families.
    OddUnion,
    /// n = 2rk, union of both even families with δ_r in the set A.
    EvenUnion,
}

impl Theorem {
    pub fn parity(self) -> Parity {
        match self {
            Theorem::OddUnion => Parity::Odd,
            Theorem::EvenUnion => Parity::Even,
        }
    }

    pub fn n(self, k: u32, r: u32) -> u32 {
        match self {
            Theorem::OddUnion => (2 * r + 1) * k,
            Theorem::EvenUnion => 2 * r * k,
        }
    }
}

fn big(x: u64) -> BigUint {
    BigUint::from(x)
}

fn pow(q: u64, e: u32) -> BigUint {
    big(q).pow(e)
}

/// `num / den`, failing if the division leaves a remainder.
pub fn exact_div(num: &BigUint, den: &BigUint) -> Result<BigUint, OrbitError> {
    let (quot, rem) = num.div_rem(den);
    if rem.is_zero() {
        Ok(quot)
    } else {
        Err(OrbitError::InexactDivision(format!("{num} / {den}")))
    }
}

fn check_domain(q: u64, k: u32, r: u32) -> Result<(), OrbitError> {
    if crate::field::factor::prime_power(q).is_none() {
        return Err(OrbitError::InvalidParams(format!(
            "q = {q} is not a prime power"
        )));
    }
    if k < 2 || r < 2 {
        return Err(OrbitError::InvalidParams("need k >= 2 and r >= 2".into()));
    }
    Ok(())
}

/// ⌊(q^k − 2)/2⌋, the size of the set A.
pub fn set_a_size(q: u64, k: u32) -> BigUint {
    (pow(q, k) - 2u32) / 2u32
}

/// Number of orbit generators the union uses, i.e. size·(q−1)/(q^n−1).
pub fn orbit_count(thm: Theorem, q: u64, k: u32, r: u32) -> Result<BigUint, OrbitError> {
    check_domain(q, k, r)?;
    let units = pow(q, k) - 1u32;
    let s = big(extra_l_count(thm.parity(), r) as u64);
    let q1 = big(q - 1);
    Ok(match thm {
        Theorem::OddUnion => {
            (big(r as u64) + s) * units.pow(r) * &q1 + big(r as u64) * units.pow(r - 1)
        }
        Theorem::EvenUnion => {
            let r1 = big(r as u64 - 1);
            ((&r1 + s) * &units * &q1 + &r1) * units.pow(r - 2) * set_a_size(q, k)
        }
    })
}

/// The displayed union size, evaluated literally with its final division
/// by q − 1 checked for exactness.
pub fn theorem_size(thm: Theorem, q: u64, k: u32, r: u32) -> Result<BigUint, OrbitError> {
    check_domain(q, k, r)?;
    let units = pow(q, k) - 1u32;
    let n = thm.n(k, r);
    let qn1 = pow(q, n) - 1u32;
    let q1 = big(q - 1);
    let s = big(extra_l_count(thm.parity(), r) as u64);
    let num = match thm {
        Theorem::OddUnion => {
            let rr = big(r as u64);
            ((&rr + s) * &units * &q1 + &rr) * units.pow(r - 1) * qn1
        }
        Theorem::EvenUnion => {
            let r1 = big(r as u64 - 1);
            ((&r1 + s) * &units * &q1 + &r1) * units.pow(r - 2) * set_a_size(q, k) * qn1
        }
    };
    exact_div(&num, &q1)
}

/// Previously best known size for n = (2r+1)k:
/// r[(q^k−1)^r(q^n−1) + (q^k−1)^(r−1)(q^n−1)/(q−1)].
pub fn prior_odd(q: u64, k: u32, r: u32) -> Result<BigUint, OrbitError> {
    check_domain(q, k, r)?;
    let units = pow(q, k) - 1u32;
    let qn1 = pow(q, (2 * r + 1) * k) - 1u32;
    let tail = exact_div(&(units.pow(r - 1) * &qn1), &big(q - 1))?;
    Ok(big(r as u64) * (units.pow(r) * &qn1 + tail))
}

/// Previously best known size for n = 2rk:
/// ⌊(q^k−2)/2⌋(r−1)(q^k−1)^(r−1)(q^n−1).
pub fn prior_even(q: u64, k: u32, r: u32) -> Result<BigUint, OrbitError> {
    check_domain(q, k, r)?;
    let units = pow(q, k) - 1u32;
    let qn1 = pow(q, 2 * r * k) - 1u32;
    Ok(set_a_size(q, k) * big(r as u64 - 1) * units.pow(r - 1) * qn1)
}

/// Previously best known size for n = 5k: (q^k−1)(3q^k−2)(q^n−1)/(q−1).
pub fn prior_five_k(q: u64, k: u32) -> Result<BigUint, OrbitError> {
    check_domain(q, k, 2)?;
    let qk = pow(q, k);
    let qn1 = pow(q, 5 * k) - 1u32;
    exact_div(&((&qk - 1u32) * (qk * 3u32 - 2u32) * qn1), &big(q - 1))
}

/// ⌊r/i⌋ − ⌊r/(i+1)⌋ summed over 2 ≤ i ≤ p₀ (odd) or its ceiling variant
/// (even).
fn extra(parity: Parity, r: u32) -> BigUint {
    big(extra_l_count(parity, r) as u64)
}

/// Rows of the size comparison table.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TableRow {
    Odd,
    Even,
    FiveK,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub row: TableRow,
    pub q: u64,
    pub k: u32,
    pub r: u32,
    pub n: u32,
    #[serde(with = "decimal")]
    pub ours: BigUint,
    #[serde(with = "decimal")]
    pub known: BigUint,
    #[serde(with = "decimal")]
    pub difference: BigUint,
    pub rate_ours: f64,
    pub rate_known: f64,
}

/// Evaluates our size, the previous best and the printed difference
/// expression, and checks `ours − known = difference` exactly.
pub fn compare_with_prior(row: TableRow, q: u64, k: u32, r: u32) -> Result<Comparison, OrbitError> {
    let units = pow(q, k) - 1u32;
    let q1 = big(q - 1);
    let (n, ours, known, difference) = match row {
        TableRow::Odd => {
            let n = (2 * r + 1) * k;
            let qn1 = pow(q, n) - 1u32;
            let diff = extra(Parity::Odd, r) * units.pow(r) * qn1;
            (
                n,
                theorem_size(Theorem::OddUnion, q, k, r)?,
                prior_odd(q, k, r)?,
                diff,
            )
        }
        TableRow::Even => {
            let n = 2 * r * k;
            let qn1 = pow(q, n) - 1u32;
            let r1 = big(r as u64 - 1);
            let num = (extra(Parity::Even, r) * &units * &q1 + r1)
                * units.pow(r - 2)
                * set_a_size(q, k)
                * qn1;
            let diff = exact_div(&num, &q1)?;
            (
                n,
                theorem_size(Theorem::EvenUnion, q, k, r)?,
                prior_even(q, k, r)?,
                diff,
            )
        }
        TableRow::FiveK => {
            if r != 2 {
                return Err(OrbitError::InvalidParams("the n = 5k row has r = 2".into()));
            }
            let n = 5 * k;
            let qn1 = pow(q, n) - 1u32;
            // 3(q^k−1)²(q^n−1) + 2(q^k−1)(q^n−1)/(q−1)
            let ours = units.pow(2) * &qn1 * 3u32 + exact_div(&(&units * &qn1 * 2u32), &q1)?;
            if ours != theorem_size(Theorem::OddUnion, q, k, 2)? {
                return Err(OrbitError::InvalidParams(
                    "n = 5k display disagrees with the general odd size".into(),
                ));
            }
            // ((q^k−1)(3q−6)+1)(q^k−1)(q^n−1)/(q−1), with 3q − 6 ≥ 0 for q ≥ 2
            let factor = &units * big(3 * q - 6) + 1u32;
            let diff = exact_div(&(factor * &units * qn1), &q1)?;
            (n, ours, prior_five_k(q, k)?, diff)
        }
    };
    if ours < known || &ours - &known != difference {
        return Err(OrbitError::DifferenceMismatch {
            ours: ours.to_string(),
            known: known.to_string(),
            difference: difference.to_string(),
        });
    }
    Ok(Comparison {
        row,
        q,
        k,
        r,
        n,
        rate_ours: rate(&ours, q, n, k),
        rate_known: rate(&known, q, n, k),
        ours,
        known,
        difference,
    })
}

/// Gaussian binomial [n k]_q as an exact integer.
pub fn gaussian_binomial(q: u64, n: u32, k: u32) -> Result<BigUint, OrbitError> {
    if k > n {
        return Ok(BigUint::zero());
    }
    let mut num = BigUint::one();
    let mut den = BigUint::one();
    for i in 0..k {
        num *= pow(q, n - i) - 1u32;
        den *= pow(q, k - i) - 1u32;
    }
    exact_div(&num, &den)
}

/// Sphere-packing bound for minimum distance 2δ + 2:
/// [n, k−δ]_q / [k, k−δ]_q.
pub fn sphere_packing_bound(q: u64, n: u32, k: u32, delta: u32) -> Result<BigRational, OrbitError> {
    if delta > k || k > n {
        return Err(OrbitError::InvalidParams("need delta <= k <= n".into()));
    }
    let num = gaussian_binomial(q, n, k - delta)?;
    let den = gaussian_binomial(q, k, k - delta)?;
    Ok(BigRational::new(num.into(), den.into()))
}

/// Johnson bound for minimum distance 2δ:
/// ∏_{i=0}^{k−δ} (q^(n−i) − 1)/(q^(k−i) − 1).
pub fn johnson_bound(q: u64, n: u32, k: u32, delta: u32) -> Result<BigRational, OrbitError> {
    if delta < 1 || delta > k || k > n {
        return Err(OrbitError::InvalidParams(
            "need 1 <= delta <= k <= n".into(),
        ));
    }
    let mut acc = BigRational::one();
    for i in 0..=(k - delta) {
        let num = pow(q, n - i) - 1u32;
        let den = pow(q, k - i) - 1u32;
        acc *= BigRational::new(num.into(), den.into());
    }
    Ok(acc)
}

/// The common value of both bounds at n = 4k and distance 2k − 2:
/// (q^4k − 1)(q^(4k−1) − 1)/((q^k − 1)(q^(k−1) − 1)).
pub fn four_k_bound(q: u64, k: u32) -> BigRational {
    let num = (pow(q, 4 * k) - 1u32) * (pow(q, 4 * k - 1) - 1u32);
    let den = (pow(q, k) - 1u32) * (pow(q, k - 1) - 1u32);
    BigRational::new(num.into(), den.into())
}

/// Natural logarithm of a big integer, accurate to double precision.
pub fn ln_big(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().expect("fits in f64").ln();
    }
    let shift = bits - 64;
    let top = (x >> shift).to_f64().expect("64-bit value");
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// log_q |C| / (n·k).
pub fn rate(size: &BigUint, q: u64, n: u32, k: u32) -> f64 {
    ln_big(size) / (q as f64).ln() / (n as f64 * k as f64)
}

/// Size of the even union at r = 2 (n = 4k) over the common bound, exactly.
pub fn ratio_to_bound(q: u64, k: u32) -> Result<BigRational, OrbitError> {
    let size = theorem_size(Theorem::EvenUnion, q, k, 2)?;
    Ok(BigRational::from_integer(size.into()) / four_k_bound(q, k))
}

pub fn rational_to_f64(x: &BigRational) -> f64 {
    // scale so both parts fit comfortably before dividing
    let n = x.numer().magnitude();
    let d = x.denom().magnitude();
    (ln_big(n) - ln_big(d)).exp()
}

/// Serializes big integers as decimal strings.
pub mod decimal {
    use num_bigint::BigUint;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &BigUint, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&x.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigUint, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(D::Error::custom)
    }
}
