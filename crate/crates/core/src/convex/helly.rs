use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{feasible, intersect, ConvexError, Halfspace, RationalHalfspaceSystem};
use crate::simplicial::{empty_simplices, face_vertices, nerve, Face, SetSystem, SimplicialError};

/// Convex polytopes with an interior point each; the oracle tries those
/// points before running elimination.
#[derive(Debug, Clone)]
pub struct PolytopeSystem {
    pub dim: usize,
    pub sets: Vec<RationalHalfspaceSystem>,
    pub hints: Vec<Vec<BigRational>>,
}

impl PolytopeSystem {
    pub fn meet(&self, subset: Face) -> Result<bool, ConvexError> {
        let idx = face_vertices(subset);
        if idx.is_empty() {
            return Ok(true);
        }
        if self
            .hints
            .iter()
            .any(|p| idx.iter().all(|&i| self.sets[i].contains(p)))
        {
            return Ok(true);
        }
        let parts: Vec<&RationalHalfspaceSystem> = idx.iter().map(|&i| &self.sets[i]).collect();
        feasible(&intersect(&parts)?)
    }
}

impl SetSystem for PolytopeSystem {
    fn len(&self) -> usize {
        self.sets.len()
    }

    fn intersects(&self, subset: Face) -> Result<bool, SimplicialError> {
        self.meet(subset).map_err(|e| SimplicialError::Oracle(e.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Violation {
    /// An empty `r`-simplex with `r > d`.
    EmptySimplex { vertices: Vec<usize>, r: usize },
    /// Every sub-family of at most `d+1` sets meets but the whole family does not.
    MetricHelly,
    /// `d+1` disjoint pairs whose cross intersections are all nonempty while
    /// no pair meets.
    DisjointPairs { pairs: Vec<(usize, usize)> },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TrialReport {
    pub dim: usize,
    pub sets: usize,
    pub seed: u64,
    pub nerve_faces: usize,
    pub nerve_dim: i64,
    /// `(vertices, r)` for every empty simplex, including those with `r ≤ d`.
    pub empty_simplices: Vec<(Vec<usize>, usize)>,
    pub violations: Vec<Violation>,
}

impl TrialReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// SplitMix64 finalizer of `master + (index + 1)·φ`; the per-trial seed
/// depends only on the master seed and the trial index.
pub fn trial_seed(master: u64, index: u64) -> u64 {
    let mut z = master.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn q(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// `m` random polytopes in `Q^d`: each has an integer centre in `[-5, 5]^d`
/// and `d+1..=d+3` halfspaces with small integer normals passing at
/// distance-like offset `1..=4` from the centre.
pub fn random_polytopes(dim: usize, count: usize, seed: u64) -> PolytopeSystem {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sets = Vec::with_capacity(count);
    let mut hints = Vec::with_capacity(count);
    for _ in 0..count {
        let centre: Vec<i64> = (0..dim).map(|_| rng.gen_range(-5..=5)).collect();
        let faces = rng.gen_range(dim + 1..=dim + 3);
        let mut rows = Vec::with_capacity(faces);
        for _ in 0..faces {
            let normal: Vec<i64> = loop {
                let v: Vec<i64> = (0..dim).map(|_| rng.gen_range(-3..=3)).collect();
                if v.iter().any(|&x| x != 0) {
                    break v;
                }
            };
            let offset: i64 = rng.gen_range(1..=4);
            let b = normal.iter().zip(&centre).map(|(a, c)| a * c).sum::<i64>() + offset;
            rows.push(Halfspace::from_ints(&normal, b));
        }
        sets.push(RationalHalfspaceSystem::new(dim, rows).expect("rows built with dim coefficients"));
        hints.push(centre.into_iter().map(q).collect());
    }
    PolytopeSystem { dim, sets, hints }
}

/// All ways to choose `k` pairwise disjoint unordered pairs from `0..m`,
/// listed with increasing first elements.
fn disjoint_pairings(m: usize, k: usize) -> Vec<Vec<(usize, usize)>> {
    fn rec(m: usize, k: usize, used: u64, start: usize, cur: &mut Vec<(usize, usize)>, out: &mut Vec<Vec<(usize, usize)>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for a in start..m {
            if used >> a & 1 == 1 {
                continue;
            }
            for b in a + 1..m {
                if used >> b & 1 == 1 {
                    continue;
                }
                cur.push((a, b));
                rec(m, k, used | 1 << a | 1 << b, a + 1, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(m, k, 0, 0, &mut Vec::new(), &mut out);
    out
}

/// Nerve, empty simplices and violations for any set system viewed in dimension `d`.
pub fn detect_violations<S: SetSystem + ?Sized>(
    d: usize,
    system: &S,
) -> Result<(crate::simplicial::SimplicialComplex, Vec<(Vec<usize>, usize)>, Vec<Violation>), SimplicialError> {
    let m = system.len();
    let k = nerve(system)?;
    let empties: Vec<(Vec<usize>, usize)> = empty_simplices(&k)
        .into_iter()
        .map(|(f, r)| (face_vertices(f), r))
        .collect();
    let mut violations: Vec<Violation> = empties
        .iter()
        .filter(|(_, r)| *r > d)
        .map(|(v, r)| Violation::EmptySimplex {
            vertices: v.clone(),
            r: *r,
        })
        .collect();
    // metric Helly, queried on the family itself rather than read off the nerve
    if m > 0 {
        let mut all_small_meet = true;
        for s in (1u64..1 << m).filter(|s| s.count_ones() as usize <= d + 1) {
            if !system.intersects(s)? {
                all_small_meet = false;
                break;
            }
        }
        if all_small_meet && !system.intersects((1u64 << m) - 1)? {
            violations.push(Violation::MetricHelly);
        }
    }
    if 2 * (d + 1) <= m {
        let pair = |a: usize, b: usize| k.contains(1u64 << a | 1u64 << b);
        for pairing in disjoint_pairings(m, d + 1) {
            if pairing.iter().any(|&(a, b)| pair(a, b)) {
                continue;
            }
            let cross = pairing.iter().enumerate().all(|(i, &(a, b))| {
                pairing[i + 1..]
                    .iter()
                    .all(|&(c, e)| pair(a, c) && pair(a, e) && pair(b, c) && pair(b, e))
            });
            if cross {
                violations.push(Violation::DisjointPairs { pairs: pairing });
            }
        }
    }
    Ok((k, empties, violations))
}

/// Checks the three nerve consequences of Helly's theorem on a given family.
pub fn check_family(system: &PolytopeSystem, seed: u64) -> Result<TrialReport, ConvexError> {
    let (k, empties, violations) =
        detect_violations(system.dim, system).map_err(|e| ConvexError::Oracle(e.to_string()))?;
    Ok(TrialReport {
        dim: system.dim,
        sets: system.sets.len(),
        seed,
        nerve_faces: k.faces().len(),
        nerve_dim: k.dim(),
        empty_simplices: empties,
        violations,
    })
}

/// One seeded experiment: `m` random polytopes in `Q^d`, then [`check_family`].
pub fn helly_trial(dim: usize, count: usize, seed: u64) -> Result<TrialReport, ConvexError> {
    if dim > super::MAX_DIM {
        return Err(ConvexError::DimensionTooLarge(dim));
    }
    if count > 64 {
        return Err(ConvexError::TooManyConstraints(count));
    }
    check_family(&random_polytopes(dim, count, seed), seed)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FuzzSummary {
    pub dim: usize,
    pub sets: usize,
    pub trials: u64,
    pub master_seed: u64,
    pub passed: u64,
    /// Failing trials as `(index, report)`, in index order.
    pub failures: Vec<(u64, TrialReport)>,
    /// Trials whose feasibility query was refused, as `(index, seed, reason)`.
    pub errors: Vec<(u64, u64, String)>,
    pub max_empty_simplex_dim: Option<usize>,
}

impl FuzzSummary {
    pub fn all_passed(&self) -> bool {
        self.failures.is_empty() && self.errors.is_empty()
    }
}

/// Runs `trials` independent trials on `jobs` threads (`0` = rayon default).
/// Results do not depend on `jobs`.
pub fn helly_fuzz(dim: usize, count: usize, trials: u64, master_seed: u64, jobs: usize) -> FuzzSummary {
    let run = || {
        (0..trials)
            .into_par_iter()
            .map(|i| {
                let seed = trial_seed(master_seed, i);
                (i, seed, helly_trial(dim, count, seed))
            })
            .collect::<Vec<_>>()
    };
    let results = match rayon::ThreadPoolBuilder::new().num_threads(jobs).build() {
        Ok(pool) => pool.install(run),
        Err(_) => run(),
    };
    let mut summary = FuzzSummary {
        dim,
        sets: count,
        trials,
        master_seed,
        passed: 0,
        failures: Vec::new(),
        errors: Vec::new(),
        max_empty_simplex_dim: None,
    };
    for (i, seed, r) in results {
        match r {
            Ok(report) => {
                let top = report.empty_simplices.iter().map(|&(_, r)| r).max();
                summary.max_empty_simplex_dim = summary.max_empty_simplex_dim.max(top);
                if report.passed() {
                    summary.passed += 1;
                } else {
                    summary.failures.push((i, report));
                }
            }
            Err(e) => summary.errors.push((i, seed, e.to_string())),
        }
    }
    summary
}
