//! Exact integer matrices with determinant ±1, the backend for the `SL(n,Z)`,
//! `GL(n,Z)` and affine-group checks.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::group::{FreeAutomorphism, GroupElement, GroupError};

pub use crate::group::dihedral_check;

/// An `n × n` integer matrix of determinant ±1. The determinant is computed
/// once at construction.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntegerMatrix {
    n: usize,
    entries: Vec<BigInt>,
    det: BigInt,
}

impl IntegerMatrix {
    pub fn identity(n: usize) -> Self {
        let mut entries = vec![BigInt::zero(); n * n];
        for i in 0..n {
            entries[i * n + i] = BigInt::one();
        }
        IntegerMatrix {
            n,
            entries,
            det: BigInt::one(),
        }
    }

    /// Row-major entries; rejects matrices whose determinant is not ±1.
    pub fn new(n: usize, entries: Vec<BigInt>) -> Result<Self, GroupError> {
        if entries.len() != n * n {
            return Err(GroupError::Mismatch {
                left: format!("{} entries", entries.len()),
                right: format!("dimension {n}"),
            });
        }
        let det = determinant(n, &entries);
        if det.abs() != BigInt::one() {
            return Err(GroupError::NotUnimodular(det.to_string()));
        }
        Ok(IntegerMatrix { n, entries, det })
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Result<Self, GroupError> {
        let n = rows.len();
        let mut entries = Vec::with_capacity(n * n);
        for r in rows {
            if r.len() != n {
                return Err(GroupError::Mismatch {
                    left: format!("row of length {}", r.len()),
                    right: format!("dimension {n}"),
                });
            }
            entries.extend(r.iter().map(|&x| BigInt::from(x)));
        }
        Self::new(n, entries)
    }

    /// `E_ij = I_n + U_ij` (1-based).
    pub fn elementary(n: usize, i: usize, j: usize) -> Result<Self, GroupError> {
        check_index(i, n)?;
        check_index(j, n)?;
        if i == j {
            return Err(GroupError::EqualIndices(i));
        }
        let mut m = Self::identity(n);
        m.entries[(i - 1) * n + (j - 1)] = BigInt::one();
        Ok(m)
    }

    /// Diagonal matrix with `-1` at the listed (1-based) positions: `τ_i`,
    /// `τ_1 τ_i`, `-I_n`.
    pub fn diag_sign(n: usize, flips: &[usize]) -> Result<Self, GroupError> {
        let mut m = Self::identity(n);
        for &i in flips {
            check_index(i, n)?;
            m.entries[(i - 1) * n + (i - 1)] = -BigInt::one();
        }
        if flips.len() % 2 == 1 {
            m.det = -BigInt::one();
        }
        // repeated indices flip twice; recompute to stay honest
        m.det = determinant(n, &m.entries);
        Ok(m)
    }

    /// Permutation matrix sending `e_i` to `e_{π(i)}`.
    pub fn permutation(perm: &[usize]) -> Result<Self, GroupError> {
        let n = perm.len();
        let mut seen = vec![false; n];
        for &p in perm {
            if p == 0 || p > n || seen[p - 1] {
                return Err(GroupError::NotAPermutation(n));
            }
            seen[p - 1] = true;
        }
        let mut entries = vec![BigInt::zero(); n * n];
        for (i, &p) in perm.iter().enumerate() {
            entries[(p - 1) * n + i] = BigInt::one();
        }
        Self::new(n, entries)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Entry at 1-based `(row, col)`.
    pub fn entry(&self, row: usize, col: usize) -> &BigInt {
        &self.entries[(row - 1) * self.n + (col - 1)]
    }

    pub fn determinant(&self) -> &BigInt {
        &self.det
    }

    pub fn determinant_sign(&self) -> i32 {
        if self.det.is_negative() {
            -1
        } else {
            1
        }
    }

    pub fn rows(&self) -> Vec<Vec<BigInt>> {
        self.entries.chunks(self.n).map(|r| r.to_vec()).collect()
    }
}

fn check_index(i: usize, n: usize) -> Result<(), GroupError> {
    if i == 0 || i > n {
        Err(GroupError::IndexOutOfRange { index: i, bound: n })
    } else {
        Ok(())
    }
}

/// Fraction-free Gaussian elimination (Bareiss).
fn determinant(n: usize, entries: &[BigInt]) -> BigInt {
    if n == 0 {
        return BigInt::one();
    }
    let mut a = entries.to_vec();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k * n + k].is_zero() {
            match (k + 1..n).find(|&r| !a[r * n + k].is_zero()) {
                Some(r) => {
                    for c in 0..n {
                        a.swap(k * n + c, r * n + c);
                    }
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&a[i * n + j] * &a[k * n + k] - &a[i * n + k] * &a[k * n + j]) / &prev;
                a[i * n + j] = v;
            }
        }
        prev = a[k * n + k].clone();
    }
    sign * &a[n * n - 1]
}

fn inverse_entries(n: usize, entries: &[BigInt]) -> Vec<BigInt> {
    let mut a: Vec<BigRational> = entries.iter().map(|x| BigRational::from_integer(x.clone())).collect();
    let mut inv: Vec<BigRational> = (0..n * n)
        .map(|k| {
            if k / n == k % n {
                BigRational::one()
            } else {
                BigRational::zero()
            }
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n)
            .find(|&r| !a[r * n + col].is_zero())
            .expect("unimodular matrices are invertible");
        if pivot != col {
            for c in 0..n {
                a.swap(pivot * n + c, col * n + c);
                inv.swap(pivot * n + c, col * n + c);
            }
        }
        let p = a[col * n + col].clone();
        for c in 0..n {
            a[col * n + c] = &a[col * n + c] / &p;
            inv[col * n + c] = &inv[col * n + c] / &p;
        }
        for r in 0..n {
            if r == col || a[r * n + col].is_zero() {
                continue;
            }
            let f = a[r * n + col].clone();
            for c in 0..n {
                let da = &f * &a[col * n + c];
                let di = &f * &inv[col * n + c];
                a[r * n + c] -= da;
                inv[r * n + c] -= di;
            }
        }
    }
    inv.into_iter().map(|q| q.to_integer()).collect()
}

impl GroupElement for IntegerMatrix {
    fn identity_like(&self) -> Self {
        IntegerMatrix::identity(self.n)
    }

    fn same_group(&self, other: &Self) -> bool {
        self.n == other.n
    }

    fn group_label(&self) -> String {
        format!("GL({},Z)", self.n)
    }

    fn mul_unchecked(&self, other: &Self) -> Self {
        let n = self.n;
        let mut entries = vec![BigInt::zero(); n * n];
        for i in 0..n {
            for k in 0..n {
                let a = &self.entries[i * n + k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    entries[i * n + j] += a * &other.entries[k * n + j];
                }
            }
        }
        IntegerMatrix {
            n,
            entries,
            det: &self.det * &other.det,
        }
    }

    fn inverse(&self) -> Self {
        IntegerMatrix {
            n: self.n,
            entries: inverse_entries(self.n, &self.entries),
            det: self.det.clone(),
        }
    }
}

impl fmt::Debug for IntegerMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for IntegerMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (r, row) in self.entries.chunks(self.n).enumerate() {
            if r > 0 {
                write!(f, "; ")?;
            }
            for (c, x) in row.iter().enumerate() {
                if c > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{x}")?;
            }
        }
        write!(f, "]")
    }
}

/// Induced map on `Z^n`: column `j` holds the exponent sums of the image of `x_j`.
///
/// With this orientation `abelianization(a ∘ b) = abelianization(a) · abelianization(b)`,
/// and `λ_ij` maps to `E_ji`.
pub fn abelianization(a: &FreeAutomorphism) -> IntegerMatrix {
    let n = a.rank();
    let mut entries = vec![BigInt::zero(); n * n];
    for j in 0..n {
        for (i, s) in a.image(j + 1).exponent_sums().into_iter().enumerate() {
            entries[i * n + j] = BigInt::from(s);
        }
    }
    IntegerMatrix::new(n, entries).expect("automorphisms abelianize to GL(n,Z)")
}

/// Membership in the index-2 subgroup `SAut(F_n)`.
pub fn in_saut(a: &FreeAutomorphism) -> bool {
    abelianization(a).determinant_sign() == 1
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{commutes, pairwise_commuting, NielsenKind};
    use proptest::prelude::*;

    fn e(n: usize, i: usize, j: usize) -> IntegerMatrix {
        IntegerMatrix::elementary(n, i, j).unwrap()
    }

    fn tau(n: usize, flips: &[usize]) -> IntegerMatrix {
        IntegerMatrix::diag_sign(n, flips).unwrap()
    }

    #[test]
    fn elementary_entries() {
        let m = e(3, 1, 3);
        for r in 1..=3 {
            for c in 1..=3 {
                let expected = i32::from(r == c || (r, c) == (1, 3));
                assert_eq!(*m.entry(r, c), BigInt::from(expected));
            }
        }
        assert!(IntegerMatrix::elementary(3, 2, 2).is_err());
        assert!(IntegerMatrix::from_rows(&[vec![2, 0], vec![0, 1]]).is_err());
    }

    #[test]
    fn tau_inverts_elementary() {
        let t1 = tau(3, &[1]);
        let c = t1.mul(&e(3, 1, 3)).unwrap().mul(&t1).unwrap();
        assert_eq!(c, e(3, 1, 3).inverse());
        assert!(commutes(&tau(3, &[2]), &e(3, 1, 3)).unwrap());
        assert!(dihedral_check(&e(3, 1, 3), &t1).unwrap());
        assert!(!dihedral_check(&e(3, 1, 3), &e(3, 1, 2)).unwrap());
    }

    #[test]
    fn lambda_epsilon_is_dihedral() {
        let l = FreeAutomorphism::lambda(1, 2, 3).unwrap();
        let eps = FreeAutomorphism::epsilon(2, 3).unwrap();
        assert!(dihedral_check(&l, &eps).unwrap());
    }

    #[test]
    fn inverse_and_determinant() {
        let m = IntegerMatrix::from_rows(&[vec![2, 1], vec![1, 1]]).unwrap();
        assert!(m.mul(&m.inverse()).unwrap().is_identity());
        assert_eq!(m.determinant_sign(), 1);
        let p = IntegerMatrix::permutation(&[2, 1, 3]).unwrap();
        assert_eq!(p.determinant_sign(), -1);
        assert_eq!(tau(4, &[1, 2, 3, 4]).determinant_sign(), 1);
    }

    #[test]
    fn sl_dihedral_factors() {
        for n in 3..=6 {
            // GL: ⟨τ_i, E_in⟩
            let gl: Vec<Vec<_>> = (1..n).map(|i| vec![tau(n, &[i]), e(n, i, n)]).collect();
            // odd n: −I·τ_i; even n: τ_1 τ_i for i ≥ 2
            let all: Vec<usize> = (1..=n).collect();
            let minus = tau(n, &all);
            let odd: Vec<Vec<_>> = (1..n)
                .map(|i| vec![minus.mul(&tau(n, &[i])).unwrap(), e(n, i, n)])
                .collect();
            let even: Vec<Vec<_>> = (2..n)
                .map(|i| vec![tau(n, &[1, i]), e(n, i, n)])
                .collect();
            for fam in [&gl, &odd, &even] {
                assert_eq!(pairwise_commuting(fam).unwrap(), None, "n={n}");
                for pair in fam.iter() {
                    assert!(dihedral_check(&pair[1], &pair[0]).unwrap());
                }
            }
            if n % 2 == 1 {
                assert!(odd.iter().all(|p| p[0].determinant_sign() == 1));
            } else {
                assert!(even.iter().all(|p| p[0].determinant_sign() == 1));
            }
        }
    }

    #[test]
    fn abelianization_examples() {
        let l = abelianization(&FreeAutomorphism::lambda(1, 2, 3).unwrap());
        assert_eq!(l, e(3, 2, 1));
        let eps = abelianization(&FreeAutomorphism::epsilon(1, 3).unwrap());
        assert_eq!(eps, tau(3, &[1]));
        assert_eq!(eps.determinant_sign(), -1);
        assert!(abelianization(&FreeAutomorphism::identity(4)).is_identity());
    }

    fn nielsen_word() -> impl Strategy<Value = Vec<(bool, usize, usize, bool)>> {
        prop::collection::vec((any::<bool>(), 1usize..=4, 1usize..=4, any::<bool>()), 0..8)
    }

    fn build(word: &[(bool, usize, usize, bool)]) -> FreeAutomorphism {
        let mut acc = FreeAutomorphism::identity(4);
        for &(left, i, j, inv) in word {
            if i == j {
                continue;
            }
            let kind = if left { NielsenKind::Left } else { NielsenKind::Right };
            let mut g = FreeAutomorphism::nielsen(kind, i, j, 4).unwrap();
            if inv {
                g = g.inverse();
            }
            acc = acc.mul(&g).unwrap();
        }
        acc
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn abelianization_is_a_homomorphism(a in nielsen_word(), b in nielsen_word()) {
            let (a, b) = (build(&a), build(&b));
            let lhs = abelianization(&a.mul(&b).unwrap());
            let rhs = abelianization(&a).mul(&abelianization(&b)).unwrap();
            prop_assert_eq!(lhs, rhs);
        }
    }
}
