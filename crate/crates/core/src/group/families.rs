//! Named subgroups and generator families of `Aut(F_n)` used throughout the
//! fixed-point arguments: `Niel_i`, the column product `M`, dihedral products,
//! commuting conjugates of column subgroups and the torsion sets `A_1, A_2, A_3`.

use std::collections::BTreeSet;

use super::{commutator, conjugate, FreeAutomorphism, GroupElement, GroupError, NielsenKind};

/// Decides membership in `M = M_n(n-1) × M̄_n(n-1)`: the automorphisms fixing
/// `x_1, …, x_{n-1}` and sending `x_n` to `w1 x_n w2` with `w1, w2` free of `x_n`.
pub fn in_column_product(a: &FreeAutomorphism) -> bool {
    let n = a.rank();
    if n < 2 {
        return false;
    }
    for i in 1..n {
        let img = a.image(i);
        if img.len() != 1 || img.letters()[0].index() != i || !img.letters()[0].is_positive() {
            return false;
        }
    }
    let last = a.image(n);
    let hits: Vec<_> = last.letters().iter().filter(|l| l.index() == n).collect();
    hits.len() == 1 && hits[0].is_positive()
}

/// Generators `λ_{n1}, …, λ_{n,n-1}` of `M_n(n-1)`.
pub fn column_lambdas(n: usize) -> Result<Vec<FreeAutomorphism>, GroupError> {
    (1..n).map(|j| FreeAutomorphism::lambda(n, j, n)).collect()
}

/// Generators `ρ_{n1}, …, ρ_{n,n-1}` of `M̄_n(n-1)`.
pub fn column_rhos(n: usize) -> Result<Vec<FreeAutomorphism>, GroupError> {
    (1..n).map(|j| FreeAutomorphism::rho(n, j, n)).collect()
}

/// Generators of `M`: the `λ_{nj}` followed by the `ρ_{nj}`.
pub fn column_product_generators(n: usize) -> Result<Vec<FreeAutomorphism>, GroupError> {
    let mut gens = column_lambdas(n)?;
    gens.extend(column_rhos(n)?);
    Ok(gens)
}

/// Index `i - 1` taken cyclically in `1..=n`.
pub fn cyclic_predecessor(i: usize, n: usize) -> usize {
    if i == 1 {
        n
    } else {
        i - 1
    }
}

/// `Niel_l = {λ_{l,l-1}, ρ_{l,l-1}}` with indices mod `n`.
pub fn niel(l: usize, n: usize) -> Result<[FreeAutomorphism; 2], GroupError> {
    let p = cyclic_predecessor(l, n);
    Ok([FreeAutomorphism::lambda(l, p, n)?, FreeAutomorphism::rho(l, p, n)?])
}

/// One factor `L_ij = ⟨λ_ij, ε_j⟩` or `R_ij = ⟨ρ_ij, ε_j⟩` of a dihedral product.
#[derive(Debug, Clone)]
pub struct DihedralFactor {
    pub kind: NielsenKind,
    pub i: usize,
    pub j: usize,
    pub nielsen: FreeAutomorphism,
    pub involution: FreeAutomorphism,
}

impl DihedralFactor {
    pub fn new(kind: NielsenKind, i: usize, j: usize, rank: usize) -> Result<Self, GroupError> {
        Ok(DihedralFactor {
            kind,
            i,
            j,
            nielsen: FreeAutomorphism::nielsen(kind, i, j, rank)?,
            involution: FreeAutomorphism::epsilon(j, rank)?,
        })
    }

    pub fn label(&self) -> String {
        let prefix = match self.kind {
            NielsenKind::Left => "L",
            NielsenKind::Right => "R",
        };
        format!("{prefix}_{},{}", self.i, self.j)
    }

    /// Generators of finite order: `ε_j` and `ν ε_j`.
    pub fn torsion_generators(&self) -> [FreeAutomorphism; 2] {
        [
            self.involution.clone(),
            self.nielsen.mul_unchecked(&self.involution),
        ]
    }
}

/// The dihedral factors `R_{3i+1,3i+2}`, `L_{3i+1,3i+3}` (`i < m`) and, when
/// `n ≡ 2 mod 3`, the extra `R_{3m+1,3m+2}`; `m = ⌊n/3⌋`.
pub fn dihedral_product(n: usize) -> Result<Vec<DihedralFactor>, GroupError> {
    if n < 3 {
        return Err(GroupError::IndexOutOfRange { index: n, bound: 3 });
    }
    let m = n / 3;
    let mut factors = Vec::new();
    for i in 0..m {
        factors.push(DihedralFactor::new(NielsenKind::Right, 3 * i + 1, 3 * i + 2, n)?);
        factors.push(DihedralFactor::new(NielsenKind::Left, 3 * i + 1, 3 * i + 3, n)?);
    }
    if n % 3 == 2 {
        factors.push(DihedralFactor::new(NielsenKind::Right, 3 * m + 1, 3 * m + 2, n)?);
    }
    Ok(factors)
}

/// `ζ` as written: fixes `x_1..x_m`, cycles `x_{m+1} → x_{m+2} → … → x_n → x_{m+1}`,
/// composed with `ε_1` when `n - m` is odd.
pub fn zeta(n: usize, m: usize) -> Result<FreeAutomorphism, GroupError> {
    if m == 0 || m >= n {
        return Err(GroupError::IndexOutOfRange { index: m, bound: n - 1 });
    }
    let cycle = FreeAutomorphism::permutation(&cyclic_shift_perm(n, m))?;
    if (n - m) % 2 == 1 {
        cycle.mul(&FreeAutomorphism::epsilon(1, n)?)
    } else {
        Ok(cycle)
    }
}

fn cyclic_shift_perm(n: usize, m: usize) -> Vec<usize> {
    (1..=n)
        .map(|i| {
            if i <= m {
                i
            } else if i == n {
                m + 1
            } else {
                i + 1
            }
        })
        .collect()
}

/// A conjugate `γ⁻¹ ⟨gens⟩ γ` together with its conjugator.
#[derive(Debug, Clone)]
pub struct ConjugateFamily {
    pub conjugator: FreeAutomorphism,
    pub generators: Vec<FreeAutomorphism>,
}

/// The `2(n-m)` conjugates of `M_n(m) = ⟨λ_{n1}, …, λ_{nm}⟩`: the conjugates by
/// `ζ^i` (`i < n-m`), each followed by its conjugate under `ε_1 ε_j`.
pub fn column_conjugate_families(n: usize, m: usize) -> Result<Vec<ConjugateFamily>, GroupError> {
    let z = zeta(n, m)?;
    let base: Vec<_> = (1..=m)
        .map(|k| FreeAutomorphism::lambda(n, k, n))
        .collect::<Result<_, _>>()?;
    let mut families = Vec::with_capacity(2 * (n - m));
    let mut power = FreeAutomorphism::identity(n);
    for _ in 0..(n - m) {
        let gens: Vec<_> = base
            .iter()
            .map(|h| conjugate(h, &power))
            .collect::<Result<_, _>>()?;
        let j = moved_row(&gens[0]);
        let flip = FreeAutomorphism::epsilon(1, n)?.mul(&FreeAutomorphism::epsilon(j, n)?)?;
        let bar_conjugator = power.mul(&flip)?;
        let bar: Vec<_> = base
            .iter()
            .map(|h| conjugate(h, &bar_conjugator))
            .collect::<Result<_, _>>()?;
        families.push(ConjugateFamily {
            conjugator: power.clone(),
            generators: gens,
        });
        families.push(ConjugateFamily {
            conjugator: bar_conjugator,
            generators: bar,
        });
        power = power.mul(&z)?;
    }
    Ok(families)
}

/// The unique basis letter an elementary Nielsen-type automorphism moves.
fn moved_row(a: &FreeAutomorphism) -> usize {
    (1..=a.rank())
        .find(|&i| a.image(i).len() != 1 || a.image(i).letters()[0].index() != i)
        .unwrap_or(1)
}

/// `D_i = ⟨λ_{i1} ρ_{i1}⁻¹, ε_i ε_1⟩` for `i = 2..n`, as listed generator pairs.
pub fn conjugation_dihedrals(n: usize) -> Result<Vec<[FreeAutomorphism; 2]>, GroupError> {
    let e1 = FreeAutomorphism::epsilon(1, n)?;
    (2..=n)
        .map(|i| {
            let c = FreeAutomorphism::lambda(i, 1, n)?.mul(&FreeAutomorphism::rho(i, 1, n)?.inverse())?;
            let t = FreeAutomorphism::epsilon(i, n)?.mul(&e1)?;
            Ok([c, t])
        })
        .collect()
}

/// Generators `ε_1, …, ε_n, (1 2), …, (n-1 n)` of the signed permutation group `W_n`.
pub fn signed_permutation_generators(n: usize) -> Result<Vec<FreeAutomorphism>, GroupError> {
    let mut gens = (1..=n)
        .map(|i| FreeAutomorphism::epsilon(i, n))
        .collect::<Result<Vec<_>, _>>()?;
    for i in 1..n {
        gens.push(FreeAutomorphism::transposition(i, i + 1, n)?);
    }
    Ok(gens)
}

/// The sets `A_1 = {ε_n, η} ∪ sym(n-2)`, `A_2 = {θ}`, `A_3 = {τ}` with
/// `θ = ρ_12 ∘ ε_2`, `τ = (2 3) ∘ ε_1`, `η = (1 2) ∘ ε_1 ∘ ε_2`; `sym(n-2)`
/// acts on `x_3..x_n` and is listed by adjacent transpositions.
pub fn torsion_triple(n: usize) -> Result<[Vec<FreeAutomorphism>; 3], GroupError> {
    if n < 3 {
        return Err(GroupError::IndexOutOfRange { index: n, bound: 3 });
    }
    let e = |i| FreeAutomorphism::epsilon(i, n);
    let theta = FreeAutomorphism::rho(1, 2, n)?.mul(&e(2)?)?;
    let tau = FreeAutomorphism::transposition(2, 3, n)?.mul(&e(1)?)?;
    let eta = FreeAutomorphism::transposition(1, 2, n)?
        .mul(&e(1)?)?
        .mul(&e(2)?)?;
    let mut a1 = vec![e(n)?, eta];
    for i in 3..n {
        a1.push(FreeAutomorphism::transposition(i, i + 1, n)?);
    }
    Ok([a1, vec![theta], vec![tau]])
}

/// Verifies `[λ_jk, λ_ij] = λ_ik` and `[ρ_jk, ρ_ij] = ρ_ik` for one triple.
pub fn commutator_relation_holds(i: usize, j: usize, k: usize, n: usize) -> Result<bool, GroupError> {
    for kind in [NielsenKind::Left, NielsenKind::Right] {
        let jk = FreeAutomorphism::nielsen(kind, j, k, n)?;
        let ij = FreeAutomorphism::nielsen(kind, i, j, n)?;
        let ik = FreeAutomorphism::nielsen(kind, i, k, n)?;
        if commutator(&jk, &ij)? != ik {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Derives every `λ_ik` and `ρ_ik` from the given set by repeatedly applying
/// `[ν_jk, ν_ij] = ν_ik`, each step verified by exact computation.
/// Returns the `(kind, i, k)` triples not reached.
pub fn nielsen_derivation_gaps(
    gens: &[FreeAutomorphism],
) -> Result<Vec<(NielsenKind, usize, usize)>, GroupError> {
    let n = match gens.first() {
        Some(g) => g.rank(),
        None => return Err(GroupError::EmptyGenerators),
    };
    let mut missing = Vec::new();
    for kind in [NielsenKind::Left, NielsenKind::Right] {
        let mut have: BTreeSet<(usize, usize)> = BTreeSet::new();
        for i in 1..=n {
            for j in 1..=n {
                if i != j && gens.contains(&FreeAutomorphism::nielsen(kind, i, j, n)?) {
                    have.insert((i, j));
                }
            }
        }
        loop {
            let mut added = false;
            let snapshot: Vec<_> = have.iter().copied().collect();
            for &(j, k) in &snapshot {
                for &(i, j2) in &snapshot {
                    if j2 != j || i == k || have.contains(&(i, k)) {
                        continue;
                    }
                    let c = commutator(
                        &FreeAutomorphism::nielsen(kind, j, k, n)?,
                        &FreeAutomorphism::nielsen(kind, i, j, n)?,
                    )?;
                    if c == FreeAutomorphism::nielsen(kind, i, k, n)? {
                        have.insert((i, k));
                        added = true;
                    }
                }
            }
            if !added {
                break;
            }
        }
        for i in 1..=n {
            for k in 1..=n {
                if i != k && !have.contains(&(i, k)) {
                    missing.push((kind, i, k));
                }
            }
        }
    }
    Ok(missing)
}
