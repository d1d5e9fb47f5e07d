//! An operator channel that erases and inserts dimensions, and a
//! minimum-distance decoder to go with it.
//!
//! Trial `i` draws from ChaCha8 seeded with `seed` on stream `i`, so runs
//! are reproducible and independent of thread count.

use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::FieldTower;
use crate::linalg::Scalars;
use crate::subspace::Subspace;

/// Largest codebook [`materialize`] will build.
pub const CODEBOOK_CAP: usize = 1 << 16;

const RETRIES: usize = 64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ChannelError {
    #[error("cannot erase {erasures} dimensions of a {dim}-dimensional codeword")]
    TooManyErasures { erasures: usize, dim: usize },
    #[error("cannot insert {insertions} dimensions, only {room} lie outside the codeword")]
    InfeasibleNoise { insertions: usize, room: usize },
    #[error("no generic draw after {0} attempts")]
    DegenerateDraws(usize),
    #[error("codebook would hold {size} words, cap is {cap}")]
    CodebookTooLarge { size: usize, cap: usize },
    #[error("empty codebook")]
    EmptyCodebook,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChannelConfig {
    pub erasures: usize,
    pub insertions: usize,
    pub trials: u64,
    pub seed: u64,
}

impl ChannelConfig {
    pub fn validate(&self, k: usize, n: usize) -> Result<(), ChannelError> {
        if self.erasures > k {
            return Err(ChannelError::TooManyErasures {
                erasures: self.erasures,
                dim: k,
            });
        }
        if self.insertions > n - k {
            return Err(ChannelError::InfeasibleNoise {
                insertions: self.insertions,
                room: n - k,
            });
        }
        Ok(())
    }
}

fn random_vector(s: &Scalars, len: usize, rng: &mut impl Rng) -> Vec<u8> {
    (0..len).map(|_| rng.gen_range(0..s.q()) as u8).collect()
}

/// Keeps a random (k−ρ)-dimensional subspace of the codeword and adds t
/// random dimensions meeting the codeword only in zero, so the received
/// space sits at distance exactly ρ + t.
pub fn transmit(
    tower: &FieldTower,
    sent: &Subspace,
    cfg: &ChannelConfig,
    rng: &mut impl Rng,
) -> Result<Subspace, ChannelError> {
    let s = tower.scalars();
    let (k, n) = (sent.dim(), sent.ambient_dim());
    cfg.validate(k, n)?;
    let keep = k - cfg.erasures;
    let kept = (0..RETRIES)
        .map(|_| {
            (0..keep)
                .map(|_| {
                    let mut v = vec![0u8; n];
                    for b in sent.basis() {
                        let c = rng.gen_range(0..s.q()) as u8;
                        s.axpy(&mut v, c, b);
                    }
                    v
                })
                .collect::<Vec<_>>()
        })
        .find(|rows| s.rank(rows) == keep)
        .ok_or(ChannelError::DegenerateDraws(RETRIES))?;
    let noise = (0..RETRIES)
        .map(|_| {
            (0..cfg.insertions)
                .map(|_| random_vector(s, n, rng))
                .collect::<Vec<_>>()
        })
        .find(|rows| {
            let mut all = sent.basis().to_vec();
            all.extend(rows.iter().cloned());
            s.rank(&all) == k + cfg.insertions
        })
        .ok_or(ChannelError::DegenerateDraws(RETRIES))?;
    let mut rows = kept;
    rows.extend(noise);
    let received = Subspace::from_rows(s, n, rows);
    debug_assert_eq!(
        sent.distance(&received, s).ok(),
        Some(cfg.erasures + cfg.insertions)
    );
    Ok(received)
}

/// Index of a nearest codeword, lowest index on ties.
pub fn md_decode(scalars: &Scalars, received: &Subspace, codebook: &[Subspace]) -> Option<usize> {
    codebook
        .iter()
        .enumerate()
        .map(|(i, c)| (received.distance(c, scalars).unwrap_or(usize::MAX), i))
        .min()
        .map(|(_, i)| i)
}

/// Every distinct shift of every generator, in generator order and then
/// projective-representative order.
pub fn materialize(
    tower: &FieldTower,
    generators: &[Subspace],
    cap: usize,
) -> Result<Vec<Subspace>, ChannelError> {
    let total: num_bigint::BigUint = generators.iter().map(|g| g.orbit_size(tower)).sum();
    let size = usize::try_from(&total).unwrap_or(usize::MAX);
    if size > cap {
        return Err(ChannelError::CodebookTooLarge { size, cap });
    }
    let count = tower.projective_count().expect("bounded by the cap");
    let mut seen = HashSet::with_capacity(size);
    let mut out = Vec::with_capacity(size);
    for g in generators {
        let shifts: Vec<Subspace> = (0..count)
            .into_par_iter()
            .map(|a| {
                g.shift(tower, &tower.projective_rep_at(a))
                    .expect("nonzero shift")
            })
            .collect();
        for w in shifts {
            if seen.insert(w.clone()) {
                out.push(w);
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimulationReport {
    pub trials: u64,
    pub successes: u64,
    pub codebook_size: usize,
    pub min_distance: usize,
    pub erasures: usize,
    pub insertions: usize,
    pub seed: u64,
    /// 2(ρ + t) < d, under which every trial must decode correctly.
    pub guarantee_active: bool,
}

/// Sends a uniformly chosen codeword per trial and counts correct decodes.
pub fn simulate(
    tower: &FieldTower,
    codebook: &[Subspace],
    min_distance: usize,
    cfg: &ChannelConfig,
) -> Result<SimulationReport, ChannelError> {
    let first = codebook.first().ok_or(ChannelError::EmptyCodebook)?;
    cfg.validate(first.dim(), first.ambient_dim())?;
    let s = tower.scalars();
    let successes = (0..cfg.trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(i);
            let idx = rng.gen_range(0..codebook.len());
            let received = transmit(tower, &codebook[idx], cfg, &mut rng)?;
            let decoded = md_decode(s, &received, codebook).ok_or(ChannelError::EmptyCodebook)?;
            Ok(u64::from(codebook[decoded] == codebook[idx]))
        })
        .try_reduce(|| 0, |a, b| Ok(a + b))?;
    Ok(SimulationReport {
        trials: cfg.trials,
        successes,
        codebook_size: codebook.len(),
        min_distance,
        erasures: cfg.erasures,
        insertions: cfg.insertions,
        seed: cfg.seed,
        guarantee_active: 2 * (cfg.erasures + cfg.insertions) < min_distance,
    })
}
