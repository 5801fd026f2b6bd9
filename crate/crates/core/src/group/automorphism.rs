use std::fmt;
use std::hash::{Hash, Hasher};

use super::{GroupElement, GroupError, Letter, ReducedWord};

/// Automorphism of the free group `F_rank`, stored as the images of the basis
/// letters together with the images of the inverse map.
///
/// The inverse witness is checked when the value is built, so every
/// `FreeAutomorphism` in existence is a genuine automorphism. Equality and
/// hashing look at the forward images only.
#[derive(Clone)]
pub struct FreeAutomorphism {
    rank: usize,
    images: Vec<ReducedWord>,
    inverse_images: Vec<ReducedWord>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NielsenKind {
    /// `λ_ij : x_i ↦ x_j x_i`
    Left,
    /// `ρ_ij : x_i ↦ x_i x_j`
    Right,
}

impl FreeAutomorphism {
    pub fn identity(rank: usize) -> Self {
        let basis: Vec<_> = (1..=rank)
            .map(|i| ReducedWord::generator(rank, i).expect("index within rank"))
            .collect();
        FreeAutomorphism {
            rank,
            images: basis.clone(),
            inverse_images: basis,
        }
    }

    /// Builds an automorphism from basis images and a claimed inverse,
    /// verifying that the two maps are mutually inverse on every basis letter.
    pub fn new(
        rank: usize,
        images: Vec<ReducedWord>,
        inverse_images: Vec<ReducedWord>,
    ) -> Result<Self, GroupError> {
        for (got, expected) in [(images.len(), rank), (inverse_images.len(), rank)] {
            if got != expected {
                return Err(GroupError::Mismatch {
                    left: format!("{got} images"),
                    right: format!("rank {expected}"),
                });
            }
        }
        for w in images.iter().chain(inverse_images.iter()) {
            if w.rank() != rank {
                return Err(GroupError::Mismatch {
                    left: format!("word of rank {}", w.rank()),
                    right: format!("rank {rank}"),
                });
            }
        }
        let candidate = FreeAutomorphism {
            rank,
            images,
            inverse_images,
        };
        for i in 1..=rank {
            let basis = [Letter::pos(i)];
            let there_and_back = substitute(&candidate.inverse_images, substitute(&candidate.images, &basis).letters());
            let back_and_there = substitute(&candidate.images, substitute(&candidate.inverse_images, &basis).letters());
            if there_and_back.letters() != basis || back_and_there.letters() != basis {
                return Err(GroupError::InverseWitnessFailed(i));
            }
        }
        Ok(candidate)
    }

    /// Convenience constructor from signed-integer encodings (`-2` is `x_2⁻¹`).
    pub fn from_signed(
        rank: usize,
        images: &[&[i32]],
        inverse_images: &[&[i32]],
    ) -> Result<Self, GroupError> {
        let fw = images
            .iter()
            .map(|w| ReducedWord::from_signed(rank, w))
            .collect::<Result<Vec<_>, _>>()?;
        let bw = inverse_images
            .iter()
            .map(|w| ReducedWord::from_signed(rank, w))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(rank, fw, bw)
    }

    /// Nielsen transformation `λ_ij` or `ρ_ij`.
    pub fn nielsen(kind: NielsenKind, i: usize, j: usize, rank: usize) -> Result<Self, GroupError> {
        check_index(i, rank)?;
        check_index(j, rank)?;
        if i == j {
            return Err(GroupError::EqualIndices(i));
        }
        let (i, j) = (i as i32, j as i32);
        let (fw, bw): (Vec<i32>, Vec<i32>) = match kind {
            NielsenKind::Left => (vec![j, i], vec![-j, i]),
            NielsenKind::Right => (vec![i, j], vec![i, -j]),
        };
        let mut images = Vec::with_capacity(rank);
        let mut inverse_images = Vec::with_capacity(rank);
        for k in 1..=rank as i32 {
            if k == i {
                images.push(ReducedWord::from_signed(rank, &fw)?);
                inverse_images.push(ReducedWord::from_signed(rank, &bw)?);
            } else {
                images.push(ReducedWord::from_signed(rank, &[k])?);
                inverse_images.push(ReducedWord::from_signed(rank, &[k])?);
            }
        }
        Self::new(rank, images, inverse_images)
    }

    pub fn lambda(i: usize, j: usize, rank: usize) -> Result<Self, GroupError> {
        Self::nielsen(NielsenKind::Left, i, j, rank)
    }

    pub fn rho(i: usize, j: usize, rank: usize) -> Result<Self, GroupError> {
        Self::nielsen(NielsenKind::Right, i, j, rank)
    }

    /// `x_i ↦ x_{π(i)}^{s(i)}`. `perm` holds `π(1), …, π(rank)` (1-based);
    /// `negate[i]` selects `s(i+1) = -1`.
    pub fn signed_perm(perm: &[usize], negate: &[bool]) -> Result<Self, GroupError> {
        let rank = perm.len();
        if negate.len() != rank {
            return Err(GroupError::SignLength {
                got: negate.len(),
                expected: rank,
            });
        }
        let mut seen = vec![false; rank];
        for &p in perm {
            if p == 0 || p > rank || seen[p - 1] {
                return Err(GroupError::NotAPermutation(rank));
            }
            seen[p - 1] = true;
        }
        let mut images = vec![ReducedWord::identity(rank); rank];
        let mut inverse_images = vec![ReducedWord::identity(rank); rank];
        for i in 0..rank {
            let target = perm[i];
            let positive = !negate[i];
            images[i] = ReducedWord::reduce(rank, [Letter::new(target, positive)])?;
            inverse_images[target - 1] = ReducedWord::reduce(rank, [Letter::new(i + 1, positive)])?;
        }
        Self::new(rank, images, inverse_images)
    }

    /// `ε_i : x_i ↦ x_i⁻¹`.
    pub fn epsilon(i: usize, rank: usize) -> Result<Self, GroupError> {
        check_index(i, rank)?;
        let perm: Vec<usize> = (1..=rank).collect();
        let mut negate = vec![false; rank];
        negate[i - 1] = true;
        Self::signed_perm(&perm, &negate)
    }

    /// The basis permutation `(i j)`.
    pub fn transposition(i: usize, j: usize, rank: usize) -> Result<Self, GroupError> {
        check_index(i, rank)?;
        check_index(j, rank)?;
        let mut perm: Vec<usize> = (1..=rank).collect();
        perm.swap(i - 1, j - 1);
        Self::signed_perm(&perm, &vec![false; rank])
    }

    /// Basis permutation sending `x_i ↦ x_{perm[i-1]}`.
    pub fn permutation(perm: &[usize]) -> Result<Self, GroupError> {
        Self::signed_perm(perm, &vec![false; perm.len()])
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn images(&self) -> &[ReducedWord] {
        &self.images
    }

    pub fn inverse_images(&self) -> &[ReducedWord] {
        &self.inverse_images
    }

    /// Image of `x_i` (1-based).
    pub fn image(&self, i: usize) -> &ReducedWord {
        &self.images[i - 1]
    }

    /// Applies the automorphism to a word.
    pub fn apply(&self, word: &ReducedWord) -> Result<ReducedWord, GroupError> {
        if word.rank() != self.rank {
            return Err(GroupError::Mismatch {
                left: self.group_label(),
                right: format!("word of rank {}", word.rank()),
            });
        }
        Ok(substitute(&self.images, word.letters()))
    }

    /// `a ∘ b`: applies `b` first, then `a`.
    pub fn compose(a: &Self, b: &Self) -> Result<Self, GroupError> {
        a.mul(b)
    }
}

/// Substitutes each letter of `word` by its image, reducing as it goes.
fn substitute(images: &[ReducedWord], word: &[Letter]) -> ReducedWord {
    let rank = images.first().map_or(0, |w| w.rank());
    let mut out = ReducedWord::identity(rank);
    for &l in word {
        let img = &images[l.index() - 1];
        if l.is_positive() {
            out.extend_reduced(img.letters());
        } else {
            out.extend_reduced(img.inverse().letters());
        }
    }
    out
}

fn check_index(i: usize, rank: usize) -> Result<(), GroupError> {
    if i == 0 || i > rank {
        Err(GroupError::IndexOutOfRange {
            index: i,
            bound: rank,
        })
    } else {
        Ok(())
    }
}

impl PartialEq for FreeAutomorphism {
    fn eq(&self, other: &Self) -> bool {
        self.rank == other.rank && self.images == other.images
    }
}

impl Eq for FreeAutomorphism {}

impl Hash for FreeAutomorphism {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.rank.hash(state);
        for w in &self.images {
            w.letters().hash(state);
        }
    }
}

impl fmt::Debug for FreeAutomorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Aut(F{})[{}]", self.rank, self)
    }
}

impl fmt::Display for FreeAutomorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, w) in self.images.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "x{} -> {}", i + 1, w)?;
        }
        Ok(())
    }
}

impl GroupElement for FreeAutomorphism {
    fn identity_like(&self) -> Self {
        FreeAutomorphism::identity(self.rank)
    }

    fn same_group(&self, other: &Self) -> bool {
        self.rank == other.rank
    }

    fn group_label(&self) -> String {
        format!("Aut(F_{})", self.rank)
    }

    fn mul_unchecked(&self, other: &Self) -> Self {
        let images = other
            .images
            .iter()
            .map(|w| substitute(&self.images, w.letters()))
            .collect();
        let inverse_images = self
            .inverse_images
            .iter()
            .map(|w| substitute(&other.inverse_images, w.letters()))
            .collect();
        FreeAutomorphism {
            rank: self.rank,
            images,
            inverse_images,
        }
    }

    fn inverse(&self) -> Self {
        FreeAutomorphism {
            rank: self.rank,
            images: self.inverse_images.clone(),
            inverse_images: self.images.clone(),
        }
    }

    fn is_identity(&self) -> bool {
        self.images
            .iter()
            .enumerate()
            .all(|(i, w)| w.letters() == [Letter::pos(i + 1)])
    }
}

/// Standard braid generator `σ_i` acting on `F_m`:
/// `x_i ↦ x_i x_{i+1} x_i⁻¹`, `x_{i+1} ↦ x_i`, other letters fixed.
pub fn braid_generator(i: usize, strands: usize) -> Result<FreeAutomorphism, GroupError> {
    if i == 0 || i + 1 > strands {
        return Err(GroupError::IndexOutOfRange {
            index: i,
            bound: strands.saturating_sub(1),
        });
    }
    let m = strands;
    let (a, b) = (i as i32, i as i32 + 1);
    let mut images: Vec<Vec<i32>> = (1..=m as i32).map(|k| vec![k]).collect();
    let mut inverse: Vec<Vec<i32>> = images.clone();
    images[i - 1] = vec![a, b, -a];
    images[i] = vec![a];
    inverse[i - 1] = vec![b];
    inverse[i] = vec![-b, a, b];
    let fw: Vec<&[i32]> = images.iter().map(Vec::as_slice).collect();
    let bw: Vec<&[i32]> = inverse.iter().map(Vec::as_slice).collect();
    FreeAutomorphism::from_signed(m, &fw, &bw)
}

/// `σ_m = σ_1 ⋯ σ_{m-2} σ_{m-1} σ_{m-2}⁻¹ ⋯ σ_1⁻¹`, closing the strands into a circle.
pub fn braid_sigma_m(strands: usize) -> Result<FreeAutomorphism, GroupError> {
    if strands < 2 {
        return Err(GroupError::IndexOutOfRange {
            index: strands,
            bound: 2,
        });
    }
    let m = strands;
    let mut prefix = FreeAutomorphism::identity(m);
    for i in 1..=m - 2 {
        prefix = prefix.mul_unchecked(&braid_generator(i, m)?);
    }
    Ok(prefix
        .mul_unchecked(&braid_generator(m - 1, m)?)
        .mul_unchecked(&prefix.inverse()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{commutator, commutes, conjugate};

    fn word(rank: usize, letters: &[i32]) -> ReducedWord {
        ReducedWord::from_signed(rank, letters).unwrap()
    }

    #[test]
    fn nielsen_images() {
        let l12 = FreeAutomorphism::lambda(1, 2, 3).unwrap();
        let r12 = FreeAutomorphism::rho(1, 2, 3).unwrap();
        assert_eq!(l12.image(1).to_signed(), vec![2, 1]);
        assert_eq!(r12.image(1).to_signed(), vec![1, 2]);
        assert_eq!(l12.image(3).to_signed(), vec![3]);
        assert_eq!(l12.inverse().image(1).to_signed(), vec![-2, 1]);
        assert_eq!(r12.inverse().image(1).to_signed(), vec![1, -2]);
        assert_eq!(
            FreeAutomorphism::lambda(2, 2, 3).unwrap_err(),
            GroupError::EqualIndices(2)
        );
        assert!(FreeAutomorphism::rho(1, 4, 3).is_err());
    }

    #[test]
    fn bad_inverse_witness_is_rejected() {
        let err = FreeAutomorphism::from_signed(2, &[&[2, 1], &[2]], &[&[2, 1], &[2]]).unwrap_err();
        assert_eq!(err, GroupError::InverseWitnessFailed(1));
    }

    #[test]
    fn signed_permutations() {
        let e1 = FreeAutomorphism::epsilon(1, 2).unwrap();
        assert!(e1.mul(&e1).unwrap().is_identity());
        let swap = FreeAutomorphism::transposition(1, 2, 3).unwrap();
        let e1 = FreeAutomorphism::epsilon(1, 3).unwrap();
        let e2 = FreeAutomorphism::epsilon(2, 3).unwrap();
        // direct substitution oracle: (1 2) ε_1 (1 2) sends x_2 -> x_1 -> x_1^-1 -> x_2^-1
        assert_eq!(conjugate(&e1, &swap).unwrap(), e2);
        let id = FreeAutomorphism::signed_perm(&[1, 2, 3], &[false; 3]).unwrap();
        assert!(id.is_identity());
        assert_eq!(
            FreeAutomorphism::signed_perm(&[1, 1, 3], &[false; 3]).unwrap_err(),
            GroupError::NotAPermutation(3)
        );
        assert!(FreeAutomorphism::signed_perm(&[1, 2], &[false; 3]).is_err());
    }

    #[test]
    fn composition_convention() {
        let l12 = FreeAutomorphism::lambda(1, 2, 3).unwrap();
        assert!(FreeAutomorphism::compose(&l12, &l12.inverse()).unwrap().is_identity());
        let r12 = FreeAutomorphism::rho(1, 2, 3).unwrap();
        let l13 = FreeAutomorphism::lambda(1, 3, 3).unwrap();
        let ab = FreeAutomorphism::compose(&r12, &l13).unwrap();
        let ba = FreeAutomorphism::compose(&l13, &r12).unwrap();
        // hand substitution: x1 -> x3 x1 -> x3 x1 x2
        assert_eq!(ab.image(1), &word(3, &[3, 1, 2]));
        assert_eq!(ab, ba);
        let e1 = FreeAutomorphism::epsilon(1, 3).unwrap();
        let e2 = FreeAutomorphism::epsilon(2, 3).unwrap();
        assert_eq!(e1.mul(&e2).unwrap(), e2.mul(&e1).unwrap());
        // apply-right-first: (λ12 ∘ λ21)(x2) = λ12(x1 x2) = x2 x1 x2
        let l21 = FreeAutomorphism::lambda(2, 1, 3).unwrap();
        assert_eq!(l12.mul(&l21).unwrap().image(2), &word(3, &[2, 1, 2]));
        let other_rank = FreeAutomorphism::lambda(1, 2, 4).unwrap();
        assert!(l12.mul(&other_rank).is_err());
    }

    /// Product of two substitution maps read the other way round (`b ∘ a`).
    fn apply_left_first(a: &FreeAutomorphism, b: &FreeAutomorphism) -> FreeAutomorphism {
        b.mul(a).unwrap()
    }

    #[test]
    fn lambda_commutator_relation_fixes_the_convention() {
        let l23 = FreeAutomorphism::lambda(2, 3, 3).unwrap();
        let l12 = FreeAutomorphism::lambda(1, 2, 3).unwrap();
        let l13 = FreeAutomorphism::lambda(1, 3, 3).unwrap();
        let right_first = commutator(&l23, &l12).unwrap();
        // the same word a^-1 b^-1 a b evaluated with the opposite composition order
        let left_first = apply_left_first(
            &apply_left_first(&apply_left_first(&l23.inverse(), &l12.inverse()), &l23),
            &l12,
        );
        assert_eq!(right_first, l13);
        assert_ne!(left_first, l13);
        assert!(commutator(&l12, &l12).unwrap().is_identity());
        let l13_4 = FreeAutomorphism::lambda(1, 3, 4).unwrap();
        let l24_4 = FreeAutomorphism::lambda(2, 4, 4).unwrap();
        assert!(commutes(&l13_4, &l24_4).unwrap());
    }

    #[test]
    fn braid_generators() {
        let s1 = braid_generator(1, 3).unwrap();
        let s2 = braid_generator(2, 3).unwrap();
        let lhs = s1.mul(&s2).unwrap().mul(&s1).unwrap();
        let rhs = s2.mul(&s1).unwrap().mul(&s2).unwrap();
        assert_eq!(lhs, rhs);
        assert!(braid_generator(3, 3).is_err());
        assert!(braid_generator(0, 3).is_err());
        let s1 = braid_generator(1, 4).unwrap();
        let s3 = braid_generator(3, 4).unwrap();
        assert!(commutes(&s1, &s3).unwrap());
    }

    #[test]
    fn sigma_m_closes_the_circle() {
        // punctures 4 and 1 are adjacent on the circle, 4 and 2 are not
        let s1 = braid_generator(1, 4).unwrap();
        let s2 = braid_generator(2, 4).unwrap();
        let s3 = braid_generator(3, 4).unwrap();
        let s4 = braid_sigma_m(4).unwrap();
        assert!(commutes(&s4, &s2).unwrap());
        assert!(!commutes(&s4, &s1).unwrap());
        assert!(!commutes(&s4, &s3).unwrap());
        let braid = |a: &FreeAutomorphism, b: &FreeAutomorphism| {
            a.mul(b).unwrap().mul(a).unwrap() == b.mul(a).unwrap().mul(b).unwrap()
        };
        assert!(braid(&s3, &s4));
        assert!(braid(&s4, &s1));
    }
}
