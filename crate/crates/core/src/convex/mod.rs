//! Exact rational polyhedra `{x ∈ Q^d : a·x ≤ b}` with Fourier–Motzkin
//! feasibility, and the seeded Helly experiments built on them.

mod helly;

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

pub use helly::{
    check_family, detect_violations, helly_fuzz, helly_trial, random_polytopes, trial_seed, FuzzSummary, PolytopeSystem,
    TrialReport, Violation,
};

pub const MAX_DIM: usize = 6;
pub const MAX_CONSTRAINTS: usize = 200;
/// Intermediate Fourier–Motzkin systems larger than this are refused.
pub const MAX_INTERMEDIATE: usize = 50_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConvexError {
    #[error("dimension {0} exceeds the supported maximum of 6")]
    DimensionTooLarge(usize),
    #[error("{0} constraints exceed the supported maximum of 200")]
    TooManyConstraints(usize),
    #[error("elimination produced {0} intermediate constraints; refusing")]
    IntermediateBlowup(usize),
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("constraint has {got} coefficients, expected {expected}")]
    CoefficientCount { got: usize, expected: usize },
    #[error("no systems to intersect")]
    Empty,
    #[error("{0}")]
    Oracle(String),
}

/// One closed halfspace `a·x ≤ b`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Halfspace {
    pub a: Vec<BigRational>,
    pub b: BigRational,
}

impl Halfspace {
    pub fn new(a: Vec<BigRational>, b: BigRational) -> Self {
        Halfspace { a, b }
    }

    pub fn from_ints(a: &[i64], b: i64) -> Self {
        Halfspace {
            a: a.iter().map(|&x| BigRational::from_integer(BigInt::from(x))).collect(),
            b: BigRational::from_integer(BigInt::from(b)),
        }
    }

    pub fn contains(&self, x: &[BigRational]) -> bool {
        let lhs: BigRational = self.a.iter().zip(x).map(|(a, x)| a * x).sum();
        lhs <= self.b
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalHalfspaceSystem {
    dim: usize,
    constraints: Vec<Halfspace>,
}

impl RationalHalfspaceSystem {
    pub fn new(dim: usize, constraints: Vec<Halfspace>) -> Result<Self, ConvexError> {
        for c in &constraints {
            if c.a.len() != dim {
                return Err(ConvexError::CoefficientCount {
                    got: c.a.len(),
                    expected: dim,
                });
            }
        }
        Ok(RationalHalfspaceSystem { dim, constraints })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn constraints(&self) -> &[Halfspace] {
        &self.constraints
    }

    pub fn contains(&self, x: &[BigRational]) -> bool {
        self.constraints.iter().all(|c| c.contains(x))
    }
}

/// Concatenation of constraint lists.
pub fn intersect(systems: &[&RationalHalfspaceSystem]) -> Result<RationalHalfspaceSystem, ConvexError> {
    let first = systems.first().ok_or(ConvexError::Empty)?;
    let mut constraints = Vec::new();
    for s in systems {
        if s.dim != first.dim {
            return Err(ConvexError::DimensionMismatch(first.dim, s.dim));
        }
        constraints.extend(s.constraints.iter().cloned());
    }
    Ok(RationalHalfspaceSystem {
        dim: first.dim,
        constraints,
    })
}

/// A constraint during elimination, with the set of original rows it came from.
#[derive(Clone)]
struct Row {
    a: Vec<BigRational>,
    b: BigRational,
    history: Vec<u64>,
}

fn history_len(h: &[u64]) -> u32 {
    h.iter().map(|w| w.count_ones()).sum()
}

/// Scales so the first nonzero coefficient has absolute value 1.
fn normalize(row: &mut Row) {
    if let Some(lead) = row.a.iter().find(|x| !x.is_zero()).map(|x| x.abs()) {
        if !lead.is_one() {
            for x in row.a.iter_mut() {
                *x = &*x / &lead;
            }
            row.b = &row.b / &lead;
        }
    }
}

fn history_subset(a: &[u64], b: &[u64]) -> bool {
    a.iter().zip(b).all(|(x, y)| x & !y == 0)
}

/// Drops a row when another row with the same direction has a bound at
/// least as tight and a history contained in its own (so the history bound
/// stays valid); `None` if some `0 ≤ b` has `b < 0`.
fn prune(rows: Vec<Row>) -> Option<Vec<Row>> {
    let mut groups: HashMap<Vec<BigRational>, Vec<Row>> = HashMap::new();
    let mut order = Vec::new();
    for mut r in rows {
        if r.a.iter().all(Zero::is_zero) {
            if r.b.is_negative() {
                return None;
            }
            continue;
        }
        normalize(&mut r);
        let group = groups.entry(r.a.clone()).or_insert_with(|| {
            order.push(r.a.clone());
            Vec::new()
        });
        if group
            .iter()
            .any(|g| g.b <= r.b && history_subset(&g.history, &r.history))
        {
            continue;
        }
        group.retain(|g| !(r.b <= g.b && history_subset(&r.history, &g.history)));
        group.push(r);
    }
    Some(
        order
            .into_iter()
            .flat_map(|k| groups.remove(&k).expect("key recorded"))
            .collect(),
    )
}

/// Exact feasibility by Fourier–Motzkin elimination with dominated-row
/// pruning and Chernikov's history bound. Systems outside the
/// envelope (`d ≤ 6`, at most 200 constraints) are refused.
pub fn feasible(system: &RationalHalfspaceSystem) -> Result<bool, ConvexError> {
    if system.dim > MAX_DIM {
        return Err(ConvexError::DimensionTooLarge(system.dim));
    }
    if system.constraints.len() > MAX_CONSTRAINTS {
        return Err(ConvexError::TooManyConstraints(system.constraints.len()));
    }
    let words = system.constraints.len().div_ceil(64).max(1);
    let rows: Vec<Row> = system
        .constraints
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let mut history = vec![0u64; words];
            history[i / 64] |= 1u64 << (i % 64);
            Row {
                a: c.a.clone(),
                b: c.b.clone(),
                history,
            }
        })
        .collect();
    let Some(mut rows) = prune(rows) else {
        return Ok(false);
    };
    for (eliminated, var) in (0..system.dim).rev().enumerate() {
        let (mut pos, mut neg, mut keep) = (Vec::new(), Vec::new(), Vec::new());
        for r in rows {
            if r.a[var].is_positive() {
                pos.push(r);
            } else if r.a[var].is_negative() {
                neg.push(r);
            } else {
                keep.push(r);
            }
        }
        let bound = eliminated as u32 + 2;
        for p in &pos {
            for n in &neg {
                let history: Vec<u64> = p.history.iter().zip(&n.history).map(|(x, y)| x | y).collect();
                if history_len(&history) > bound {
                    continue;
                }
                let (sp, sn) = (-&n.a[var], p.a[var].clone());
                let a: Vec<BigRational> = p
                    .a
                    .iter()
                    .zip(&n.a)
                    .map(|(x, y)| x * &sp + y * &sn)
                    .collect();
                let b = &p.b * &sp + &n.b * &sn;
                keep.push(Row { a, b, history });
            }
        }
        if keep.len() > MAX_INTERMEDIATE {
            return Err(ConvexError::IntermediateBlowup(keep.len()));
        }
        rows = match prune(keep) {
            Some(r) => r,
            None => return Ok(false),
        };
    }
    Ok(rows.is_empty())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    fn sys(dim: usize, rows: &[(&[i64], i64)]) -> RationalHalfspaceSystem {
        RationalHalfspaceSystem::new(dim, rows.iter().map(|(a, b)| Halfspace::from_ints(a, *b)).collect()).unwrap()
    }

    #[test]
    fn interval_examples() {
        assert!(feasible(&sys(1, &[(&[-1], 0), (&[1], 1)])).unwrap());
        assert!(!feasible(&sys(1, &[(&[-1], -1), (&[1], 0)])).unwrap());
    }

    #[test]
    fn triangle_and_shifted_side() {
        // x ≥ 0, y ≥ 0, x + y ≤ 2
        let tri = [(&[-1i64, 0][..], 0), (&[0, -1][..], 0), (&[1, 1][..], 2)];
        assert!(feasible(&sys(2, &tri)).unwrap());
        // the hypotenuse pushed past the origin
        let shifted = [(&[-1i64, 0][..], 0), (&[0, -1][..], 0), (&[1, 1][..], -1)];
        assert!(!feasible(&sys(2, &shifted)).unwrap());
    }

    #[test]
    fn envelope_is_refused() {
        let big = RationalHalfspaceSystem::new(7, vec![]).unwrap();
        assert_eq!(feasible(&big), Err(ConvexError::DimensionTooLarge(7)));
        let many = RationalHalfspaceSystem::new(1, vec![Halfspace::from_ints(&[1], 0); 201]).unwrap();
        assert_eq!(feasible(&many), Err(ConvexError::TooManyConstraints(201)));
    }

    #[test]
    fn intersect_examples() {
        let a = sys(1, &[(&[-1], 0), (&[1], 1)]);
        let b = sys(1, &[(&[-1], -2), (&[1], 3)]);
        assert_eq!(intersect(&[&a]).unwrap(), a);
        assert!(!feasible(&intersect(&[&a, &b]).unwrap()).unwrap());
        assert!(intersect(&[&a, &RationalHalfspaceSystem::new(2, vec![]).unwrap()]).is_err());
    }

    /// Candidate points: intersections of pairs of boundary lines, the foot of
    /// the perpendicular from the origin to each boundary line, and the origin.
    /// A nonempty polyhedron in the plane has a minimal face, and every minimal
    /// face contains one of these.
    fn brute_force_2d(s: &RationalHalfspaceSystem) -> bool {
        let c = s.constraints();
        let mut pts = vec![vec![q(0), q(0)]];
        for h in c {
            let n2 = &h.a[0] * &h.a[0] + &h.a[1] * &h.a[1];
            if !n2.is_zero() {
                pts.push(vec![&h.b * &h.a[0] / &n2, &h.b * &h.a[1] / &n2]);
            }
        }
        for i in 0..c.len() {
            for j in i + 1..c.len() {
                let (a, b) = (&c[i], &c[j]);
                let det = &a.a[0] * &b.a[1] - &a.a[1] * &b.a[0];
                if det.is_zero() {
                    continue;
                }
                let x = (&a.b * &b.a[1] - &a.a[1] * &b.b) / &det;
                let y = (&a.a[0] * &b.b - &a.b * &b.a[0]) / &det;
                pts.push(vec![x, y]);
            }
        }
        pts.iter().any(|p| s.contains(p))
    }

    /// In one dimension: the interval `[lo, hi]` from the bounds directly.
    fn brute_force_1d(s: &RationalHalfspaceSystem) -> bool {
        let mut lo: Option<BigRational> = None;
        let mut hi: Option<BigRational> = None;
        for h in s.constraints() {
            let a = &h.a[0];
            if a.is_zero() {
                if h.b.is_negative() {
                    return false;
                }
            } else if a.is_positive() {
                let v = &h.b / a;
                hi = Some(hi.map_or(v.clone(), |x| x.min(v)));
            } else {
                let v = &h.b / a;
                lo = Some(lo.map_or(v.clone(), |x| x.max(v)));
            }
        }
        match (lo, hi) {
            (Some(l), Some(h)) => l <= h,
            _ => true,
        }
    }

    /// Any dimension: every nonempty polyhedron has a minimal face, an affine
    /// subspace cut out by some tight constraints; adding coordinate planes
    /// `x_j = 0` pins a point of it. Try every square subsystem.
    fn brute_force_any(s: &RationalHalfspaceSystem) -> bool {
        let d = s.dim();
        let mut planes: Vec<(Vec<BigRational>, BigRational)> =
            s.constraints().iter().map(|h| (h.a.clone(), h.b.clone())).collect();
        for j in 0..d {
            let mut e = vec![q(0); d];
            e[j] = q(1);
            planes.push((e, q(0)));
        }
        let mut pick = Vec::new();
        fn rec(
            planes: &[(Vec<BigRational>, BigRational)],
            d: usize,
            start: usize,
            pick: &mut Vec<usize>,
            s: &RationalHalfspaceSystem,
        ) -> bool {
            if pick.len() == d {
                return solve(planes, pick, d).is_some_and(|x| s.contains(&x));
            }
            for i in start..planes.len() {
                pick.push(i);
                if rec(planes, d, i + 1, pick, s) {
                    return true;
                }
                pick.pop();
            }
            false
        }
        d == 0 && s.contains(&[]) || d > 0 && rec(&planes, d, 0, &mut pick, s)
    }

    fn solve(planes: &[(Vec<BigRational>, BigRational)], pick: &[usize], d: usize) -> Option<Vec<BigRational>> {
        let mut m: Vec<Vec<BigRational>> = pick
            .iter()
            .map(|&i| {
                let mut r = planes[i].0.clone();
                r.push(planes[i].1.clone());
                r
            })
            .collect();
        for c in 0..d {
            let p = (c..d).find(|&r| !m[r][c].is_zero())?;
            m.swap(c, p);
            let pv = m[c][c].clone();
            for x in m[c].iter_mut() {
                *x = &*x / &pv;
            }
            for r in 0..d {
                if r != c && !m[r][c].is_zero() {
                    let f = m[r][c].clone();
                    let pivot_row = m[c].clone();
                    for (x, y) in m[r].iter_mut().zip(&pivot_row) {
                        *x -= &f * y;
                    }
                }
            }
        }
        Some(m.into_iter().map(|r| r[d].clone()).collect())
    }

    fn rows(dim: usize) -> impl Strategy<Value = Vec<(Vec<i64>, i64)>> {
        prop::collection::vec((prop::collection::vec(-4i64..=4, dim), -6i64..=6), 0..=8)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(2000))]

        #[test]
        fn agrees_with_vertex_oracle_in_the_plane(r in rows(2)) {
            let s = RationalHalfspaceSystem::new(2, r.iter().map(|(a, b)| Halfspace::from_ints(a, *b)).collect()).unwrap();
            prop_assert_eq!(feasible(&s).unwrap(), brute_force_2d(&s));
        }

        #[test]
        fn agrees_with_interval_oracle_on_the_line(r in rows(1)) {
            let s = RationalHalfspaceSystem::new(1, r.iter().map(|(a, b)| Halfspace::from_ints(a, *b)).collect()).unwrap();
            prop_assert_eq!(feasible(&s).unwrap(), brute_force_1d(&s));
        }

        #[test]
        fn agrees_with_square_subsystem_oracle_in_space(r in rows(3)) {
            let s = RationalHalfspaceSystem::new(3, r.iter().map(|(a, b)| Halfspace::from_ints(a, *b)).collect()).unwrap();
            prop_assert_eq!(feasible(&s).unwrap(), brute_force_any(&s));
        }

        #[test]
        fn adding_systems_never_helps(a in rows(2), b in rows(2)) {
            let sa = RationalHalfspaceSystem::new(2, a.iter().map(|(x, y)| Halfspace::from_ints(x, *y)).collect()).unwrap();
            let sb = RationalHalfspaceSystem::new(2, b.iter().map(|(x, y)| Halfspace::from_ints(x, *y)).collect()).unwrap();
            let both = intersect(&[&sa, &sb]).unwrap();
            prop_assert!(!feasible(&both).unwrap() || feasible(&sa).unwrap());
        }
    }
}
