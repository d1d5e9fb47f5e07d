//! Row reduction over GF(q) (q ≤ 256) on byte vectors, with a bit-packed
//! path for GF(2), plus rank over an arbitrary [`FieldOps`] field.

use crate::field::{FieldOps, SmallField};

/// Full operation tables for GF(q), indexed by the tower's element indices.
#[derive(Clone, Debug)]
pub struct Scalars {
    q: usize,
    add: Vec<u8>,
    mul: Vec<u8>,
    neg: Vec<u8>,
    inv: Vec<u8>,
}

impl Scalars {
    pub fn from_field(f: &SmallField) -> Self {
        let q = f.order() as usize;
        assert!(q <= 256, "scalar field must have at most 256 elements");
        let mut add = vec![0u8; q * q];
        let mut mul = vec![0u8; q * q];
        for x in 0..q {
            for y in 0..q {
                add[x * q + y] = f.add(x as u32, y as u32) as u8;
                mul[x * q + y] = f.mul(x as u32, y as u32) as u8;
            }
        }
        let neg = (0..q).map(|x| f.neg(x as u32) as u8).collect();
        let inv = (0..q).map(|x| f.inv(x as u32).unwrap_or(0) as u8).collect();
        Scalars {
            q,
            add,
            mul,
            neg,
            inv,
        }
    }

    pub fn q(&self) -> usize {
        self.q
    }

    #[inline]
    pub fn add(&self, x: u8, y: u8) -> u8 {
        self.add[x as usize * self.q + y as usize]
    }

    #[inline]
    pub fn sub(&self, x: u8, y: u8) -> u8 {
        self.add(x, self.neg[y as usize])
    }

    #[inline]
    pub fn mul(&self, x: u8, y: u8) -> u8 {
        self.mul[x as usize * self.q + y as usize]
    }

    #[inline]
    pub fn neg(&self, x: u8) -> u8 {
        self.neg[x as usize]
    }

    /// Multiplicative inverse; `0` maps to `0`.
    #[inline]
    pub fn inv(&self, x: u8) -> u8 {
        self.inv[x as usize]
    }

    /// `y ← y + c·x`.
    pub fn axpy(&self, y: &mut [u8], c: u8, x: &[u8]) {
        if c == 0 {
            return;
        }
        for (a, &b) in y.iter_mut().zip(x) {
            if b != 0 {
                *a = self.add(*a, self.mul(c, b));
            }
        }
    }

    pub fn scale(&self, v: &mut [u8], c: u8) {
        for a in v.iter_mut() {
            *a = self.mul(*a, c);
        }
    }

    /// Scales `v` so its first nonzero entry is 1. Returns `false` for the
    /// zero vector.
    pub fn normalize(&self, v: &mut [u8]) -> bool {
        match v.iter().find(|&&c| c != 0) {
            None => false,
            Some(&lead) => {
                if lead != 1 {
                    let s = self.inv(lead);
                    self.scale(v, s);
                }
                true
            }
        }
    }

    /// Reduced row-echelon form of the row space; zero rows are dropped.
    pub fn rref(&self, rows: Vec<Vec<u8>>) -> Vec<Vec<u8>> {
        let width = rows.first().map_or(0, Vec::len);
        if self.q == 2 && width <= 128 {
            let packed: Vec<u128> = rows.iter().map(|r| pack(r)).collect();
            return rref_packed(packed, width)
                .into_iter()
                .map(|w| unpack(w, width))
                .collect();
        }
        let mut m = rows;
        let mut rank = 0;
        for col in 0..width {
            let Some(piv) = (rank..m.len()).find(|&i| m[i][col] != 0) else {
                continue;
            };
            m.swap(rank, piv);
            let s = self.inv(m[rank][col]);
            self.scale(&mut m[rank], s);
            let pivot_row = m[rank].clone();
            for (i, row) in m.iter_mut().enumerate() {
                if i != rank && row[col] != 0 {
                    let c = self.neg(row[col]);
                    self.axpy(row, c, &pivot_row);
                }
            }
            rank += 1;
        }
        m.truncate(rank);
        m
    }

    pub fn rank(&self, rows: &[Vec<u8>]) -> usize {
        let width = rows.first().map_or(0, Vec::len);
        if self.q == 2 && width <= 128 {
            return rank_packed(rows.iter().map(|r| pack(r)).collect());
        }
        let mut m: Vec<Vec<u8>> = rows.to_vec();
        let mut rank = 0;
        for col in 0..width {
            let Some(piv) = (rank..m.len()).find(|&i| m[i][col] != 0) else {
                continue;
            };
            m.swap(rank, piv);
            let s = self.neg(self.inv(m[rank][col]));
            let pivot_row = m[rank].clone();
            for row in m.iter_mut().skip(rank + 1) {
                if row[col] != 0 {
                    let c = self.mul(row[col], s);
                    self.axpy(row, c, &pivot_row);
                }
            }
            rank += 1;
            if rank == m.len() {
                break;
            }
        }
        rank
    }

    /// Basis of `{c : Σ cᵢ·images[i] = 0}` for the linear map sending the
    /// i-th standard basis vector to `images[i]`, via row reduction of the
    /// augmented matrix `[images | I]`.
    pub fn kernel(&self, images: &[Vec<u8>]) -> Vec<Vec<u8>> {
        let n = images.len();
        let width = images.first().map_or(0, Vec::len);
        let aug: Vec<Vec<u8>> = images
            .iter()
            .enumerate()
            .map(|(i, img)| {
                let mut row = img.clone();
                row.extend((0..n).map(|j| (i == j) as u8));
                row
            })
            .collect();
        self.rref(aug)
            .into_iter()
            .filter(|row| row[..width].iter().all(|&c| c == 0))
            .map(|row| row[width..].to_vec())
            .collect()
    }
}

/// Bit `i` of the word holds entry `i`.
pub fn pack(row: &[u8]) -> u128 {
    row.iter()
        .enumerate()
        .fold(0u128, |acc, (i, &c)| acc | (((c & 1) as u128) << i))
}

pub fn unpack(word: u128, width: usize) -> Vec<u8> {
    (0..width).map(|i| ((word >> i) & 1) as u8).collect()
}

/// Rank of GF(2) rows packed into words.
pub fn rank_packed(mut rows: Vec<u128>) -> usize {
    let mut rank = 0;
    while let Some(pos) = rows[rank..].iter().position(|&r| r != 0) {
        rows.swap(rank, rank + pos);
        let pivot = rows[rank];
        let low = pivot & pivot.wrapping_neg();
        for r in rows.iter_mut().skip(rank + 1) {
            if *r & low != 0 {
                *r ^= pivot;
            }
        }
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rank
}

/// RREF of packed GF(2) rows, pivots ordered by increasing column.
pub fn rref_packed(mut rows: Vec<u128>, width: usize) -> Vec<u128> {
    let mut rank = 0;
    for col in 0..width {
        let bit = 1u128 << col;
        let Some(pos) = rows[rank..].iter().position(|&r| r & bit != 0) else {
            continue;
        };
        rows.swap(rank, rank + pos);
        let pivot = rows[rank];
        for (i, r) in rows.iter_mut().enumerate() {
            if i != rank && *r & bit != 0 {
                *r ^= pivot;
            }
        }
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rows.truncate(rank);
    rows
}

/// Rank of a matrix over any field by Gaussian elimination.
pub fn rank_over<F: FieldOps>(f: &F, rows: &[Vec<F::Elem>]) -> usize {
    let mut m: Vec<Vec<F::Elem>> = rows.to_vec();
    let width = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..width {
        let Some(piv) = (rank..m.len()).find(|&i| !f.is_zero(&m[i][col])) else {
            continue;
        };
        m.swap(rank, piv);
        let inv = f.inv(&m[rank][col]).expect("pivot is nonzero");
        let pivot_row = m[rank].clone();
        for row in m.iter_mut().skip(rank + 1) {
            if f.is_zero(&row[col]) {
                continue;
            }
            let c = f.mul(&row[col], &inv);
            for (a, b) in row.iter_mut().zip(&pivot_row) {
                *a = f.sub(a, &f.mul(&c, b));
            }
        }
        rank += 1;
        if rank == m.len() {
            break;
        }
    }
    rank
}
