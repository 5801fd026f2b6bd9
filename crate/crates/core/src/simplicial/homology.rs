use std::collections::HashMap;

use super::{facets, Face, SimplicialComplex};

/// Rank over the two-element field of a matrix whose rows are packed bit vectors.
fn rank_gf2(mut rows: Vec<Vec<u64>>) -> usize {
    let mut rank = 0;
    let width = rows.first().map_or(0, |r| r.len() * 64);
    for col in 0..width {
        let (word, bit) = (col / 64, 1u64 << (col % 64));
        let Some(pivot) = (rank..rows.len()).find(|&r| rows[r][word] & bit != 0) else {
            continue;
        };
        rows.swap(rank, pivot);
        let pivot_row = rows[rank].clone();
        for r in 0..rows.len() {
            if r != rank && rows[r][word] & bit != 0 {
                for (a, b) in rows[r].iter_mut().zip(&pivot_row) {
                    *a ^= b;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Rank of `∂_p : C_p → C_{p-1}` over Z/2 (`p ≥ 1`).
fn boundary_rank(k: &SimplicialComplex, p: usize) -> usize {
    let lower = k.faces_of_dim(p - 1);
    let index: HashMap<Face, usize> = lower.iter().enumerate().map(|(i, &f)| (f, i)).collect();
    let words = lower.len().div_ceil(64);
    let rows: Vec<Vec<u64>> = k
        .faces_of_dim(p)
        .into_iter()
        .map(|f| {
            let mut row = vec![0u64; words];
            for s in facets(f) {
                let i = index[&s];
                row[i / 64] |= 1u64 << (i % 64);
            }
            row
        })
        .collect();
    rank_gf2(rows)
}

/// Unreduced Betti numbers over Z/2 in degrees `0..=dim`.
pub fn z2_homology_ranks(k: &SimplicialComplex) -> Vec<usize> {
    let d = k.dim();
    if d < 0 {
        return Vec::new();
    }
    let d = d as usize;
    let f = k.f_vector();
    let ranks: Vec<usize> = (0..=d + 1)
        .map(|p| if p == 0 || p > d { 0 } else { boundary_rank(k, p) })
        .collect();
    (0..=d).map(|p| f[p] - ranks[p] - ranks[p + 1]).collect()
}

/// `χ̃(K) = -1 + Σ (-1)^p f_p`.
pub fn reduced_euler_characteristic(k: &SimplicialComplex) -> i64 {
    k.f_vector()
        .iter()
        .enumerate()
        .map(|(p, &c)| if p % 2 == 0 { c as i64 } else { -(c as i64) })
        .sum::<i64>()
        - 1
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simplicial::join;

    #[test]
    fn spheres_and_balls() {
        let s2 = SimplicialComplex::boundary_of_simplex(3).unwrap();
        assert_eq!(z2_homology_ranks(&s2), vec![1, 0, 1]);
        let b = SimplicialComplex::boundary_of_simplex(2).unwrap();
        let s3 = join(&b, &b).unwrap();
        assert_eq!(z2_homology_ranks(&s3), vec![1, 0, 0, 1]);
        let ball = SimplicialComplex::simplex(5).unwrap();
        assert_eq!(z2_homology_ranks(&ball), vec![1, 0, 0, 0, 0]);
    }

    #[test]
    fn cone_is_acyclic() {
        let b = SimplicialComplex::boundary_of_simplex(2).unwrap();
        let cone = join(&b, &SimplicialComplex::simplex(1).unwrap()).unwrap();
        assert_eq!(z2_homology_ranks(&cone), vec![1, 0, 0]);
        assert_eq!(reduced_euler_characteristic(&cone), 0);
    }

    #[test]
    fn two_points() {
        let k = SimplicialComplex::discrete(2).unwrap();
        assert_eq!(z2_homology_ranks(&k), vec![2]);
        assert_eq!(reduced_euler_characteristic(&k), 1);
    }
}
