//! Finite abstract simplicial complexes on at most 64 vertices, with faces
//! stored as bitsets.

mod homology;
mod poset;

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

pub use homology::{reduced_euler_characteristic, z2_homology_ranks};
pub use poset::{admissible_poset, barycentric, nerve, AdmissiblePoset, ExplicitSets, HValue, SetSystem};

/// A face as a vertex bitset; bit `v` set means vertex `v` belongs to it.
pub type Face = u64;

pub const MAX_VERTICES: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SimplicialError {
    #[error("{0} vertices exceed the supported maximum of 64")]
    TooManyVertices(usize),
    #[error("vertex {vertex} out of range for {count} vertices")]
    VertexOutOfRange { vertex: usize, count: usize },
    #[error("face {0:#x} has a missing subface")]
    NotClosed(Face),
    #[error("set-system oracle failed: {0}")]
    Oracle(String),
}

pub fn face_of(vertices: &[usize]) -> Face {
    vertices.iter().fold(0, |acc, &v| acc | (1u64 << v))
}

pub fn face_vertices(face: Face) -> Vec<usize> {
    (0..MAX_VERTICES).filter(|&v| face >> v & 1 == 1).collect()
}

/// Faces of size one less than `face`.
pub fn facets(face: Face) -> impl Iterator<Item = Face> {
    face_vertices(face).into_iter().map(move |v| face & !(1u64 << v))
}

fn all_vertices(n: usize) -> Face {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// A downward-closed family of nonempty vertex sets that contains every vertex.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SimplicialComplex {
    vertex_count: usize,
    faces: BTreeSet<Face>,
}

impl SimplicialComplex {
    /// Closure of the given faces under subsets, together with all vertices.
    pub fn from_maximal(vertex_count: usize, generators: &[Face]) -> Result<Self, SimplicialError> {
        if vertex_count > MAX_VERTICES {
            return Err(SimplicialError::TooManyVertices(vertex_count));
        }
        let mask = all_vertices(vertex_count);
        let mut faces: BTreeSet<Face> = (0..vertex_count).map(|v| 1u64 << v).collect();
        for &g in generators {
            if g & !mask != 0 {
                return Err(SimplicialError::VertexOutOfRange {
                    vertex: 63 - (g & !mask).leading_zeros() as usize,
                    count: vertex_count,
                });
            }
            let mut stack = vec![g];
            while let Some(f) = stack.pop() {
                if f != 0 && faces.insert(f) {
                    stack.extend(facets(f));
                }
            }
        }
        Ok(SimplicialComplex {
            vertex_count,
            faces,
        })
    }

    /// Accepts an explicit face list and checks downward closure.
    pub fn from_faces(vertex_count: usize, faces: &[Face]) -> Result<Self, SimplicialError> {
        if vertex_count > MAX_VERTICES {
            return Err(SimplicialError::TooManyVertices(vertex_count));
        }
        let mut set: BTreeSet<Face> = (0..vertex_count).map(|v| 1u64 << v).collect();
        let mask = all_vertices(vertex_count);
        for &f in faces {
            if f & !mask != 0 {
                return Err(SimplicialError::VertexOutOfRange {
                    vertex: 63 - (f & !mask).leading_zeros() as usize,
                    count: vertex_count,
                });
            }
            if f != 0 {
                set.insert(f);
            }
        }
        for &f in &set {
            if f.count_ones() > 1 && facets(f).any(|s| !set.contains(&s)) {
                return Err(SimplicialError::NotClosed(f));
            }
        }
        Ok(SimplicialComplex {
            vertex_count,
            faces: set,
        })
    }

    /// The full simplex on `vertex_count` vertices (`Δ_{vertex_count-1}`).
    pub fn simplex(vertex_count: usize) -> Result<Self, SimplicialError> {
        Self::from_maximal(vertex_count, &[all_vertices(vertex_count)])
    }

    /// `∂Δ_k`: all proper faces of a `k`-simplex, on `k+1` vertices.
    pub fn boundary_of_simplex(k: usize) -> Result<Self, SimplicialError> {
        let top = all_vertices(k + 1);
        let gens: Vec<Face> = facets(top).filter(|&f| f != 0).collect();
        Self::from_maximal(k + 1, &gens)
    }

    /// Vertices only.
    pub fn discrete(vertex_count: usize) -> Result<Self, SimplicialError> {
        Self::from_maximal(vertex_count, &[])
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn faces(&self) -> &BTreeSet<Face> {
        &self.faces
    }

    pub fn contains(&self, face: Face) -> bool {
        self.faces.contains(&face)
    }

    /// Largest face dimension, `-1` for the empty complex.
    pub fn dim(&self) -> i64 {
        self.faces.iter().map(|f| f.count_ones() as i64 - 1).max().unwrap_or(-1)
    }

    /// Faces of dimension `p`, in increasing bitset order.
    pub fn faces_of_dim(&self, p: usize) -> Vec<Face> {
        self.faces
            .iter()
            .copied()
            .filter(|f| f.count_ones() as usize == p + 1)
            .collect()
    }

    /// `f_0, f_1, …, f_dim`.
    pub fn f_vector(&self) -> Vec<usize> {
        let d = self.dim();
        let mut counts = vec![0; (d + 1).max(0) as usize];
        for f in &self.faces {
            counts[f.count_ones() as usize - 1] += 1;
        }
        counts
    }

    pub fn maximal_faces(&self) -> Vec<Face> {
        self.faces
            .iter()
            .copied()
            .filter(|&f| !self.faces.iter().any(|&g| g != f && g & f == f))
            .collect()
    }

    /// Subcomplex induced on the vertex set `subset`, relabelled so that the
    /// chosen vertices become `0..|subset|` in increasing order.
    pub fn induced(&self, subset: Face) -> SimplicialComplex {
        let keep: Vec<usize> = face_vertices(subset & all_vertices(self.vertex_count));
        let relabel = |f: Face| {
            keep.iter()
                .enumerate()
                .filter(|&(_, &v)| f >> v & 1 == 1)
                .fold(0u64, |acc, (i, _)| acc | (1u64 << i))
        };
        SimplicialComplex {
            vertex_count: keep.len(),
            faces: self
                .faces
                .iter()
                .copied()
                .filter(|&f| f & !subset == 0)
                .map(relabel)
                .collect(),
        }
    }
}

impl fmt::Debug for SimplicialComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let faces: Vec<Vec<usize>> = self.maximal_faces().into_iter().map(face_vertices).collect();
        write!(f, "SimplicialComplex({} vertices, maximal {:?})", self.vertex_count, faces)
    }
}

/// `K ∗ L`, with the vertices of `L` shifted past those of `K`.
pub fn join(k: &SimplicialComplex, l: &SimplicialComplex) -> Result<SimplicialComplex, SimplicialError> {
    let n = k.vertex_count + l.vertex_count;
    if n > MAX_VERTICES {
        return Err(SimplicialError::TooManyVertices(n));
    }
    let shift = k.vertex_count as u32;
    let mut faces: BTreeSet<Face> = k.faces.clone();
    for &t in &l.faces {
        let t = t << shift;
        faces.insert(t);
        for &s in &k.faces {
            faces.insert(s | t);
        }
    }
    Ok(SimplicialComplex {
        vertex_count: n,
        faces,
    })
}

/// Non-faces `V` with `|V| ≥ 2` all of whose facets are faces, paired with `r = |V| - 1`.
pub fn empty_simplices(k: &SimplicialComplex) -> Vec<(Face, usize)> {
    let mut found = BTreeSet::new();
    for &s in &k.faces {
        for v in 0..k.vertex_count {
            let bit = 1u64 << v;
            if s & bit != 0 {
                continue;
            }
            let cand = s | bit;
            if !k.contains(cand) && facets(cand).all(|f| k.contains(f)) {
                found.insert(cand);
            }
        }
    }
    let mut out: Vec<(Face, usize)> = found
        .into_iter()
        .map(|f| (f, f.count_ones() as usize - 1))
        .collect();
    out.sort_by_key(|&(f, r)| (r, f));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn boundary_and_simplex() {
        let b = SimplicialComplex::boundary_of_simplex(2).unwrap();
        assert_eq!(b.f_vector(), vec![3, 3]);
        assert_eq!(empty_simplices(&b), vec![(0b111, 2)]);
        let s = SimplicialComplex::simplex(3).unwrap();
        assert_eq!(s.f_vector(), vec![3, 3, 1]);
        assert!(empty_simplices(&s).is_empty());
    }

    #[test]
    fn square_has_two_empty_diagonals() {
        let s0 = SimplicialComplex::boundary_of_simplex(1).unwrap();
        let c4 = join(&s0, &s0).unwrap();
        assert_eq!(c4.f_vector(), vec![4, 4]);
        let empties = empty_simplices(&c4);
        assert_eq!(empties, vec![(face_of(&[0, 1]), 1), (face_of(&[2, 3]), 1)]);
    }

    #[test]
    fn from_faces_rejects_open_families() {
        assert!(SimplicialComplex::from_faces(3, &[0b111]).is_err());
        assert!(SimplicialComplex::from_faces(3, &[0b011, 0b101, 0b110, 0b111]).is_ok());
        assert!(SimplicialComplex::from_maximal(65, &[]).is_err());
        assert!(SimplicialComplex::from_maximal(2, &[0b100]).is_err());
    }

    #[test]
    fn join_dimension_adds() {
        let a = SimplicialComplex::boundary_of_simplex(2).unwrap();
        let b = SimplicialComplex::simplex(2).unwrap();
        let j = join(&a, &b).unwrap();
        assert_eq!(j.dim(), a.dim() + b.dim() + 1);
    }

    #[test]
    fn induced_subcomplex() {
        let s = SimplicialComplex::simplex(4).unwrap();
        let sub = s.induced(0b0111);
        assert_eq!(sub.faces().len(), 7);
    }
}
