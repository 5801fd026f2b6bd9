use std::collections::BTreeSet;

use serde::Serialize;

use super::{face_vertices, facets, Face, SimplicialComplex, SimplicialError, MAX_VERTICES};

/// An indexed family of sets known only through which sub-families intersect.
///
/// The oracle must be monotone: if the sets indexed by `J` meet, so do those
/// indexed by any nonempty `I ⊆ J`. [`nerve`] relies on this to skip queries.
pub trait SetSystem {
    fn len(&self) -> usize;

    /// Whether the sets indexed by the bits of `subset` have a common point.
    fn intersects(&self, subset: Face) -> Result<bool, SimplicialError>;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Finite sets of labels.
#[derive(Debug, Clone)]
pub struct ExplicitSets {
    pub sets: Vec<BTreeSet<u32>>,
}

impl ExplicitSets {
    pub fn new(sets: Vec<Vec<u32>>) -> Self {
        ExplicitSets {
            sets: sets.into_iter().map(|s| s.into_iter().collect()).collect(),
        }
    }
}

impl SetSystem for ExplicitSets {
    fn len(&self) -> usize {
        self.sets.len()
    }

    fn intersects(&self, subset: Face) -> Result<bool, SimplicialError> {
        let idx = face_vertices(subset);
        let Some((&first, rest)) = idx.split_first() else {
            return Ok(true);
        };
        let first = self.sets.get(first).ok_or(SimplicialError::VertexOutOfRange {
            vertex: first,
            count: self.sets.len(),
        })?;
        Ok(first.iter().any(|x| rest.iter().all(|&i| self.sets[i].contains(x))))
    }
}

/// Nerve: one simplex per admissible index set. Candidates of size `r+1` are
/// only queried when all of their facets are admissible.
pub fn nerve<S: SetSystem + ?Sized>(system: &S) -> Result<SimplicialComplex, SimplicialError> {
    let m = system.len();
    if m > MAX_VERTICES {
        return Err(SimplicialError::TooManyVertices(m));
    }
    let mut faces: Vec<Face> = Vec::new();
    let mut layer: Vec<Face> = Vec::new();
    for v in 0..m {
        if system.intersects(1u64 << v)? {
            layer.push(1u64 << v);
        }
    }
    // empty sets are still vertices of the complex but span nothing
    let mut all: BTreeSet<Face> = layer.iter().copied().collect();
    while !layer.is_empty() {
        faces.extend(&layer);
        let mut next = BTreeSet::new();
        for &f in &layer {
            let top = 64 - f.leading_zeros() as usize;
            for v in top..m {
                let cand = f | (1u64 << v);
                if facets(cand).all(|s| all.contains(&s)) && system.intersects(cand)? {
                    next.insert(cand);
                }
            }
        }
        all.extend(next.iter().copied());
        layer = next.into_iter().collect();
    }
    SimplicialComplex::from_faces(m, &faces)
}

/// `h(I)`, or `Maximal` where no admissible set strictly contains `I`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum HValue {
    Value(i64),
    Maximal,
}

/// The admissible sets ordered by inclusion, with `h(I) = max{|J| - |I| : I ⊊ J} - 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdmissiblePoset {
    pub elements: Vec<Face>,
    pub h: Vec<HValue>,
}

impl AdmissiblePoset {
    pub fn h_of(&self, set: Face) -> Option<HValue> {
        self.elements.iter().position(|&e| e == set).map(|i| self.h[i])
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
}

pub fn admissible_poset<S: SetSystem + ?Sized>(system: &S) -> Result<AdmissiblePoset, SimplicialError> {
    let n = nerve(system)?;
    let elements: Vec<Face> = n
        .faces()
        .iter()
        .copied()
        .filter(|&f| system.intersects(f).unwrap_or(false))
        .collect();
    let h = elements
        .iter()
        .map(|&i| {
            elements
                .iter()
                .filter(|&&j| j != i && j & i == i)
                .map(|j| j.count_ones() as i64 - i.count_ones() as i64)
                .max()
                .map_or(HValue::Maximal, |gap| HValue::Value(gap - 1))
        })
        .collect();
    Ok(AdmissiblePoset { elements, h })
}

/// Barycentric subdivision: vertices are the faces of `k` in increasing
/// bitset order, simplices are chains under inclusion.
pub fn barycentric(k: &SimplicialComplex) -> Result<SimplicialComplex, SimplicialError> {
    let verts: Vec<Face> = k.faces().iter().copied().collect();
    if verts.len() > MAX_VERTICES {
        return Err(SimplicialError::TooManyVertices(verts.len()));
    }
    // maximal chains suffice as generators
    let mut generators = Vec::new();
    let mut stack: Vec<(usize, Face)> = (0..verts.len())
        .filter(|&i| verts[i].count_ones() == 1)
        .map(|i| (i, 1u64 << i))
        .collect();
    while let Some((last, chain)) = stack.pop() {
        let mut extended = false;
        for (j, &g) in verts.iter().enumerate() {
            if g != verts[last] && g & verts[last] == verts[last] && g.count_ones() == verts[last].count_ones() + 1 {
                stack.push((j, chain | (1u64 << j)));
                extended = true;
            }
        }
        if !extended {
            generators.push(chain);
        }
    }
    SimplicialComplex::from_maximal(verts.len(), &generators)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simplicial::{face_of, z2_homology_ranks};

    fn triangle_edges() -> ExplicitSets {
        // pairwise intersecting, no common point
        ExplicitSets::new(vec![vec![1, 2], vec![2, 3], vec![3, 1]])
    }

    #[test]
    fn nerve_examples() {
        let b = nerve(&triangle_edges()).unwrap();
        assert_eq!(b, SimplicialComplex::boundary_of_simplex(2).unwrap());
        let full = nerve(&ExplicitSets::new(vec![vec![0, 1], vec![0], vec![0, 2], vec![0]])).unwrap();
        assert_eq!(full, SimplicialComplex::simplex(4).unwrap());
        let disjoint = nerve(&ExplicitSets::new(vec![vec![0], vec![1], vec![2]])).unwrap();
        assert_eq!(disjoint, SimplicialComplex::discrete(3).unwrap());
    }

    #[test]
    fn h_values() {
        let full = ExplicitSets::new(vec![vec![0], vec![0], vec![0]]);
        let p = admissible_poset(&full).unwrap();
        assert_eq!(p.h_of(face_of(&[0])), Some(HValue::Value(1)));
        assert_eq!(p.h_of(face_of(&[0, 1, 2])), Some(HValue::Maximal));
        let p = admissible_poset(&triangle_edges()).unwrap();
        assert_eq!(p.h_of(face_of(&[0])), Some(HValue::Value(0)));
        assert_eq!(p.len(), 6);
    }

    #[test]
    fn barycentric_hexagon() {
        let b = SimplicialComplex::boundary_of_simplex(2).unwrap();
        let sd = barycentric(&b).unwrap();
        assert_eq!(sd.f_vector(), vec![6, 6]);
        assert_eq!(z2_homology_ranks(&sd), vec![1, 1]);
        let sd2 = barycentric(&SimplicialComplex::simplex(3).unwrap()).unwrap();
        assert_eq!(sd2.f_vector(), vec![7, 12, 6]);
    }

    #[test]
    fn barycentric_of_nerve_counts_poset() {
        let sys = ExplicitSets::new(vec![vec![0, 1], vec![1, 2], vec![2, 0], vec![0, 1, 2]]);
        let n = nerve(&sys).unwrap();
        let p = admissible_poset(&sys).unwrap();
        assert_eq!(barycentric(&n).unwrap().vertex_count(), p.len());
    }
}
