//! Exact group arithmetic: free groups, their automorphisms, and the generic
//! element contract shared with the integer-matrix backend.
//!
//! Products follow one convention everywhere: `a.mul(&b)` is the element that
//! applies `b` first and then `a` (function composition `a ∘ b`). Under this
//! convention `[λ_23, λ_12] = λ_13` with `[a, b] = a⁻¹ b⁻¹ a b`.

mod automorphism;
mod closure;
pub mod families;
mod word;

use std::collections::HashMap;
use std::fmt::Debug;
use std::hash::Hash;

use thiserror::Error;

pub use automorphism::{braid_generator, braid_sigma_m, NielsenKind, FreeAutomorphism};
pub use closure::{closure_enumerate, ClosureOutcome, FiniteClosure, DEFAULT_CLOSURE_CAP};
pub use word::{Letter, ReducedWord};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupError {
    #[error("letter x{index} out of range for rank {rank}")]
    LetterOutOfRange { index: usize, rank: usize },
    #[error("index {index} out of range 1..={bound}")]
    IndexOutOfRange { index: usize, bound: usize },
    #[error("indices must differ (got {0} twice)")]
    EqualIndices(usize),
    #[error("group mismatch: {left} vs {right}")]
    Mismatch { left: String, right: String },
    #[error("not a permutation of 1..={0}")]
    NotAPermutation(usize),
    #[error("sign vector has length {got}, expected {expected}")]
    SignLength { got: usize, expected: usize },
    #[error("inverse witness does not invert the map on x{0}")]
    InverseWitnessFailed(usize),
    #[error("matrix is not invertible over the integers (determinant {0})")]
    NotUnimodular(String),
    #[error("empty generating set")]
    EmptyGenerators,
    #[error("missing witness for {0}")]
    MissingWitness(String),
    #[error("witness for {0} fails verification")]
    WitnessMismatch(String),
}

/// Abstract group element: identity, multiplication, inversion and equality.
///
/// Elements carry their ambient group (rank or dimension) at runtime, so
/// mixing groups is reported through [`GroupError::Mismatch`].
pub trait GroupElement: Clone + Eq + Hash + Debug + Send + Sync {
    fn identity_like(&self) -> Self;
    fn same_group(&self, other: &Self) -> bool;
    fn group_label(&self) -> String;
    /// Product `self · other`, assuming [`same_group`](Self::same_group).
    fn mul_unchecked(&self, other: &Self) -> Self;
    fn inverse(&self) -> Self;

    fn is_identity(&self) -> bool {
        *self == self.identity_like()
    }

    fn mul(&self, other: &Self) -> Result<Self, GroupError> {
        self.check_same(other)?;
        Ok(self.mul_unchecked(other))
    }

    fn check_same(&self, other: &Self) -> Result<(), GroupError> {
        if self.same_group(other) {
            Ok(())
        } else {
            Err(GroupError::Mismatch {
                left: self.group_label(),
                right: other.group_label(),
            })
        }
    }

    fn pow(&self, exp: i64) -> Self {
        let base = if exp < 0 { self.inverse() } else { self.clone() };
        let mut acc = self.identity_like();
        for _ in 0..exp.unsigned_abs() {
            acc = acc.mul_unchecked(&base);
        }
        acc
    }
}

/// `a⁻¹ b⁻¹ a b`.
pub fn commutator<E: GroupElement>(a: &E, b: &E) -> Result<E, GroupError> {
    a.check_same(b)?;
    Ok(a.inverse()
        .mul_unchecked(&b.inverse())
        .mul_unchecked(a)
        .mul_unchecked(b))
}

pub fn commutes<E: GroupElement>(a: &E, b: &E) -> Result<bool, GroupError> {
    a.check_same(b)?;
    Ok(a.mul_unchecked(b) == b.mul_unchecked(a))
}

/// `g⁻¹ h g`.
pub fn conjugate<E: GroupElement>(h: &E, g: &E) -> Result<E, GroupError> {
    h.check_same(g)?;
    Ok(g.inverse().mul_unchecked(h).mul_unchecked(g))
}

/// True iff `t² = 1` and `t a t = a⁻¹`, i.e. `⟨a, t⟩` is a quotient of the
/// infinite dihedral group with `t` acting by inversion.
pub fn dihedral_check<E: GroupElement>(a: &E, t: &E) -> Result<bool, GroupError> {
    a.check_same(t)?;
    let involution = t.mul_unchecked(t).is_identity();
    let inverts = t.mul_unchecked(a).mul_unchecked(t) == a.inverse();
    Ok(involution && inverts)
}

/// First pair of non-commuting elements found by [`pairwise_commuting`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommutationViolation {
    pub set_a: usize,
    pub elem_a: usize,
    pub set_b: usize,
    pub elem_b: usize,
}

/// Checks that every element of `sets[i]` commutes with every element of
/// `sets[j]` for `i != j`. Returns the first violation in lexicographic order.
pub fn pairwise_commuting<E: GroupElement>(
    sets: &[Vec<E>],
) -> Result<Option<CommutationViolation>, GroupError> {
    for (i, a_set) in sets.iter().enumerate() {
        for (j, b_set) in sets.iter().enumerate().skip(i + 1) {
            for (ia, a) in a_set.iter().enumerate() {
                for (ib, b) in b_set.iter().enumerate() {
                    if !commutes(a, b)? {
                        return Ok(Some(CommutationViolation {
                            set_a: i,
                            elem_a: ia,
                            set_b: j,
                            elem_b: ib,
                        }));
                    }
                }
            }
        }
    }
    Ok(None)
}

/// A word over an indexed generator list: `(generator index, exponent)` pairs.
pub type GenWord = Vec<(usize, i64)>;

/// Evaluates a [`GenWord`] over `gens`.
pub fn evaluate<E: GroupElement>(gens: &[E], word: &[(usize, i64)]) -> Result<E, GroupError> {
    let first = gens.first().ok_or(GroupError::EmptyGenerators)?;
    let mut acc = first.identity_like();
    for &(idx, exp) in word {
        let g = gens.get(idx).ok_or(GroupError::IndexOutOfRange {
            index: idx,
            bound: gens.len(),
        })?;
        acc = acc.mul(&g.pow(exp))?;
    }
    Ok(acc)
}

/// Which of the two conjugates of an inner generator a witness rewrites.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ConjugateSide {
    /// `g⁻¹ h g`
    ByInverse,
    /// `g h g⁻¹`
    ByElement,
}

/// Rewriting witnesses `(outer index, inner index, side) ↦ word over inner generators`.
#[derive(Debug, Clone, Default)]
pub struct WitnessTable {
    pub entries: HashMap<(usize, usize, ConjugateSide), GenWord>,
}

/// How [`normalizes`] decides membership of conjugates in `⟨inner⟩`.
pub enum Membership<'a, E> {
    Decide(&'a (dyn Fn(&E) -> bool + Sync)),
    Witnesses(&'a WitnessTable),
}

/// A conjugate `g^{±1} h g^{∓1}` the decision procedure placed outside `⟨inner⟩`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalizationFailure {
    pub outer: usize,
    pub inner: usize,
    pub side: ConjugateSide,
}

/// Checks that `⟨outer⟩` normalizes `⟨inner⟩`: every conjugate of every inner
/// generator by every outer generator and its inverse lies in `⟨inner⟩`.
pub fn normalizes<E: GroupElement>(
    outer: &[E],
    inner: &[E],
    membership: &Membership<'_, E>,
) -> Result<Option<NormalizationFailure>, GroupError> {
    for (gi, g) in outer.iter().enumerate() {
        let g_inv = g.inverse();
        for (hi, h) in inner.iter().enumerate() {
            g.check_same(h)?;
            for side in [ConjugateSide::ByInverse, ConjugateSide::ByElement] {
                let conj = match side {
                    ConjugateSide::ByInverse => g_inv.mul_unchecked(h).mul_unchecked(g),
                    ConjugateSide::ByElement => g.mul_unchecked(h).mul_unchecked(&g_inv),
                };
                match membership {
                    Membership::Decide(decide) => {
                        if !decide(&conj) {
                            return Ok(Some(NormalizationFailure {
                                outer: gi,
                                inner: hi,
                                side,
                            }));
                        }
                    }
                    Membership::Witnesses(table) => {
                        let label = format!("outer {gi}, inner {hi}, {side:?}");
                        let word = table
                            .entries
                            .get(&(gi, hi, side))
                            .ok_or_else(|| GroupError::MissingWitness(label.clone()))?;
                        if evaluate(inner, word)? != conj {
                            return Err(GroupError::WitnessMismatch(label));
                        }
                    }
                }
            }
        }
    }
    Ok(None)
}
