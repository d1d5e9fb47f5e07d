//! Union codes built from orbit generators, their exact distance
//! verification, and the closed-form sizes and bounds they are measured
//! against.

pub mod formulas;

use std::collections::HashMap;
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use formulas::*;

use crate::field::{FieldError, FieldTower, TowerSpec};
use crate::sidon::{is_sidon, Constructions, SidonError};
use crate::subspace::{Subspace, SubspaceError};

/// Default cap on (pair, α) iterations in exact mode.
pub const DEFAULT_BUDGET: u64 = 1 << 26;

#[derive(Debug, Error)]
pub enum OrbitError {
    #[error("division is not exact: {0}")]
    InexactDivision(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error(
        "difference column mismatch: ours {ours}, known {known}, printed difference {difference}"
    )]
    DifferenceMismatch {
        ours: String,
        known: String,
        difference: String,
    },
    #[error("a code needs at least one generator")]
    EmptyCode,
    #[error("generator {index} has dimension {found}, expected {expected}")]
    DimensionMismatch {
        index: usize,
        expected: usize,
        found: usize,
    },
    #[error("generator {index} lives in dimension {found}, the tower has {expected}")]
    AmbientMismatch {
        index: usize,
        expected: usize,
        found: usize,
    },
    #[error("exact scan needs {needed} iterations, budget is {budget}")]
    Infeasible { needed: BigUint, budget: u64 },
    #[error("bad code file: {0}")]
    BadFile(String),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Subspace(#[from] SubspaceError),
    #[error(transparent)]
    Sidon(#[from] SidonError),
}

/// A union of cyclic orbit codes, one generator per orbit.
#[derive(Clone, Debug)]
pub struct UnionCode {
    pub tower: Arc<FieldTower>,
    pub generators: Vec<Subspace>,
    pub claimed_size: BigUint,
    pub claimed_min_distance: usize,
    pub provenance: String,
}

/// Collects generators into a code. The claimed size is the sum of orbit
/// sizes; the claimed distance is 2k for a single GF(q^k)-linear generator
/// and 2k − 2 otherwise.
pub fn build_union(
    tower: Arc<FieldTower>,
    generators: Vec<Subspace>,
    provenance: impl Into<String>,
) -> Result<UnionCode, OrbitError> {
    let first = generators.first().ok_or(OrbitError::EmptyCode)?;
    let k = first.dim();
    let m = tower.m();
    for (index, g) in generators.iter().enumerate() {
        if g.dim() != k {
            return Err(OrbitError::DimensionMismatch {
                index,
                expected: k,
                found: g.dim(),
            });
        }
        if g.ambient_dim() != m {
            return Err(OrbitError::AmbientMismatch {
                index,
                expected: m,
                found: g.ambient_dim(),
            });
        }
    }
    let claimed_size = generators
        .par_iter()
        .map(|g| g.orbit_size(&tower))
        .reduce(BigUint::zero, |a, b| a + b);
    let claimed_min_distance =
        if generators.len() == 1 && first.linearity_field(&tower) as usize == k {
            2 * k
        } else {
            2 * k.saturating_sub(1)
        };
    Ok(UnionCode {
        tower,
        generators,
        claimed_size,
        claimed_min_distance,
        provenance: provenance.into(),
    })
}

/// The union of every subspace the Sidon constructions produce on `tower`.
pub fn construction_code(tower: Arc<FieldTower>) -> Result<UnionCode, OrbitError> {
    let (generators, provenance) = {
        let c = Constructions::new(&tower)?;
        let params: Vec<_> = c.enumerate().collect();
        let gens = params
            .par_iter()
            .map(|p| c.make_subspace(p))
            .collect::<Result<Vec<_>, _>>()?;
        let name = match c.parity() {
            crate::sidon::Parity::Odd => "odd-union",
            crate::sidon::Parity::Even => "even-union",
        };
        (
            gens,
            format!("{name} q={} k={} r={}", tower.q(), tower.k(), c.r()),
        )
    };
    build_union(tower, generators, provenance)
}

#[derive(Serialize, Deserialize)]
struct CodeFile {
    tower: TowerSpec,
    generators: Vec<Subspace>,
    #[serde(with = "decimal")]
    claimed_size: BigUint,
    claimed_min_distance: usize,
    provenance: String,
}

impl UnionCode {
    pub fn k(&self) -> usize {
        self.generators[0].dim()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let file = CodeFile {
            tower: self.tower.spec(),
            generators: self.generators.clone(),
            claimed_size: self.claimed_size.clone(),
            claimed_min_distance: self.claimed_min_distance,
            provenance: self.provenance.clone(),
        };
        serde_json::to_value(file).expect("code serializes")
    }

    /// Rebuilds a code from its JSON form, rejecting non-canonical bases and
    /// generators that do not fit the tower. Claims are kept as written.
    pub fn from_json(value: serde_json::Value) -> Result<Self, OrbitError> {
        let file: CodeFile =
            serde_json::from_value(value).map_err(|e| OrbitError::BadFile(e.to_string()))?;
        let tower = Arc::new(FieldTower::from_spec(&file.tower)?);
        for g in &file.generators {
            g.validate(tower.scalars())?;
        }
        let mut code = build_union(tower, file.generators, file.provenance)?;
        code.claimed_size = file.claimed_size;
        code.claimed_min_distance = file.claimed_min_distance;
        Ok(code)
    }

    /// Σ orbit sizes, which is the code size when orbits are disjoint.
    pub fn orbit_size_sum(&self) -> BigUint {
        self.generators
            .par_iter()
            .map(|g| g.orbit_size(&self.tower))
            .reduce(BigUint::zero, |a, b| a + b)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Criterion,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum CriterionFailure {
    NotSidon { generator: usize },
    SharedQuotient { first: usize, second: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verification {
    /// The mode that produced `min_distance`.
    pub mode: Mode,
    /// Minimum distance over distinct codewords; `None` for a one-word code.
    pub min_distance: Option<usize>,
    /// (pair, α) iterations spent in the exact scan.
    pub iterations: u64,
    /// Whether no two generators share an orbit.
    pub disjoint: bool,
    /// Generator pairs found in a common orbit.
    pub collisions: Vec<(usize, usize)>,
    /// Why the criterion did not apply, when it was tried.
    pub criterion_failures: Vec<CriterionFailure>,
}

/// Size of the exact scan: unordered generator pairs (with repetition)
/// times projective shifts.
pub fn exact_cost(code: &UnionCode) -> BigUint {
    let g = code.generators.len() as u64;
    let pairs = BigUint::from(g) * (g + 1) / 2u32;
    pairs * ((code.tower.top_order() - 1u32) / (code.tower.q() - 1))
}

pub fn verify_min_distance(
    code: &UnionCode,
    mode: Mode,
    budget: u64,
) -> Result<Verification, OrbitError> {
    match mode {
        Mode::Exact => exact_scan(code, budget),
        Mode::Criterion => {
            let failures = criterion_failures(code);
            if failures.is_empty() {
                Ok(Verification {
                    mode: Mode::Criterion,
                    min_distance: Some(2 * code.k() - 2),
                    iterations: 0,
                    disjoint: true,
                    collisions: Vec::new(),
                    criterion_failures: failures,
                })
            } else {
                let mut v = exact_scan(code, budget)?;
                v.criterion_failures = failures;
                Ok(v)
            }
        }
    }
}

/// Every generator must be a Sidon space and no two generators may share a
/// quotient u/u' of distinct projective points. The second condition is
/// the product criterion for all pairs at once: u₁v₂ = u₂v₁ exactly when
/// u₁/u₂ = v₁/v₂.
pub fn criterion_failures(code: &UnionCode) -> Vec<CriterionFailure> {
    let tower = &code.tower;
    let top = tower.top();
    if code.k() < 2 {
        return (0..code.generators.len())
            .map(|generator| CriterionFailure::NotSidon { generator })
            .collect();
    }
    let mut failures: Vec<CriterionFailure> = code
        .generators
        .par_iter()
        .enumerate()
        .filter(|(_, g)| !is_sidon(tower, g))
        .map(|(generator, _)| CriterionFailure::NotSidon { generator })
        .collect();
    let quotients: Vec<Vec<Vec<u8>>> = code
        .generators
        .par_iter()
        .map(|g| {
            let pts = g.points(tower);
            let mut keys = Vec::with_capacity(pts.len() * pts.len());
            for a in &pts {
                for b in &pts {
                    if a != b {
                        let q = top.mul(a, &top.inv(b).expect("points are nonzero"));
                        keys.push(tower.projective_key(&q));
                    }
                }
            }
            keys.sort_unstable();
            keys.dedup();
            keys
        })
        .collect();
    let mut owner: HashMap<&[u8], usize> = HashMap::new();
    let mut shared = Vec::new();
    for (i, keys) in quotients.iter().enumerate() {
        for key in keys {
            match owner.get(key.as_slice()) {
                Some(&j) if j != i => shared.push((j, i)),
                Some(_) => {}
                None => {
                    owner.insert(key, i);
                }
            }
        }
    }
    shared.sort_unstable();
    shared.dedup();
    failures.extend(
        shared
            .into_iter()
            .map(|(first, second)| CriterionFailure::SharedQuotient { first, second }),
    );
    failures
}

#[derive(Clone, Copy)]
struct PairResult {
    min: Option<usize>,
    collision: bool,
}

impl PairResult {
    fn merge(self, o: PairResult) -> PairResult {
        let min = match (self.min, o.min) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        PairResult {
            min,
            collision: self.collision || o.collision,
        }
    }
}

/// min over pairs i ≤ j and projective α of d(Uᵢ, αUⱼ), skipping α with
/// αUⱼ = Uᵢ. For i < j such an α means the two orbits coincide and is
/// recorded as a collision.
fn exact_scan(code: &UnionCode, budget: u64) -> Result<Verification, OrbitError> {
    let needed = exact_cost(code);
    let iterations = match needed.to_u64() {
        Some(n) if n <= budget => n,
        _ => return Err(OrbitError::Infeasible { needed, budget }),
    };
    let tower = &code.tower;
    let s = tower.scalars();
    let k = code.k();
    let count = tower.projective_count().expect("within budget");
    let g = code.generators.len();
    let pairs: Vec<(usize, usize)> = (0..g).flat_map(|i| (i..g).map(move |j| (i, j))).collect();
    let results: Vec<PairResult> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let (u, v) = (&code.generators[i], &code.generators[j]);
            (0..count)
                .into_par_iter()
                .map(|n| {
                    let rows = v.shifted_rows(tower, &tower.projective_rep_at(n));
                    let d = u.intersection_dim_rows(&rows, s);
                    if d == k {
                        PairResult {
                            min: None,
                            collision: i != j,
                        }
                    } else {
                        PairResult {
                            min: Some(2 * (k - d)),
                            collision: false,
                        }
                    }
                })
                .reduce(
                    || PairResult {
                        min: None,
                        collision: false,
                    },
                    PairResult::merge,
                )
        })
        .collect();
    let collisions: Vec<(usize, usize)> = pairs
        .iter()
        .zip(&results)
        .filter(|(_, r)| r.collision)
        .map(|(&p, _)| p)
        .collect();
    let min_distance = results
        .iter()
        .fold(
            PairResult {
                min: None,
                collision: false,
            },
            |a, &b| a.merge(b),
        )
        .min;
    Ok(Verification {
        mode: Mode::Exact,
        min_distance,
        iterations,
        disjoint: collisions.is_empty(),
        collisions,
        criterion_failures: Vec::new(),
    })
}

#[cfg(test)]
mod tests;
