use std::collections::{HashSet, VecDeque};

use super::{GroupElement, GroupError};

pub const DEFAULT_CLOSURE_CAP: usize = 1_000_000;

/// A finite subgroup listed in breadth-first order from the identity.
#[derive(Debug, Clone)]
pub struct FiniteClosure<E> {
    pub generators: Vec<E>,
    pub elements: Vec<E>,
}

impl<E: GroupElement> FiniteClosure<E> {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn contains(&self, e: &E) -> bool {
        self.elements.contains(e)
    }
}

#[derive(Debug, Clone)]
pub enum ClosureOutcome<E> {
    Finite(FiniteClosure<E>),
    /// More than `cap` elements were reached. This says nothing about
    /// infiniteness, only that finiteness was not established.
    CapExceeded { cap: usize },
}

impl<E> ClosureOutcome<E> {
    pub fn finite(self) -> Option<FiniteClosure<E>> {
        match self {
            ClosureOutcome::Finite(c) => Some(c),
            ClosureOutcome::CapExceeded { .. } => None,
        }
    }

    pub fn order(&self) -> Option<usize> {
        match self {
            ClosureOutcome::Finite(c) => Some(c.elements.len()),
            ClosureOutcome::CapExceeded { .. } => None,
        }
    }
}

/// Breadth-first enumeration of `⟨generators⟩`, multiplying on the right by
/// generators and their inverses, stopping once more than `cap` elements exist.
pub fn closure_enumerate<E: GroupElement>(
    generators: &[E],
    cap: usize,
) -> Result<ClosureOutcome<E>, GroupError> {
    let first = generators.first().ok_or(GroupError::EmptyGenerators)?;
    for g in generators {
        first.check_same(g)?;
    }
    let mut steps: Vec<E> = Vec::with_capacity(2 * generators.len());
    for g in generators {
        for s in [g.clone(), g.inverse()] {
            if !steps.contains(&s) {
                steps.push(s);
            }
        }
    }
    let identity = first.identity_like();
    let mut seen: HashSet<E> = HashSet::new();
    let mut order = Vec::new();
    let mut queue = VecDeque::new();
    seen.insert(identity.clone());
    order.push(identity.clone());
    queue.push_back(identity);
    if cap == 0 {
        return Ok(ClosureOutcome::CapExceeded { cap });
    }
    while let Some(x) = queue.pop_front() {
        for s in &steps {
            let y = x.mul_unchecked(s);
            if seen.insert(y.clone()) {
                if seen.len() > cap {
                    return Ok(ClosureOutcome::CapExceeded { cap });
                }
                order.push(y.clone());
                queue.push_back(y);
            }
        }
    }
    Ok(ClosureOutcome::Finite(FiniteClosure {
        generators: generators.to_vec(),
        elements: order,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::FreeAutomorphism;

    #[test]
    fn epsilon_has_order_two() {
        let e1 = FreeAutomorphism::epsilon(1, 2).unwrap();
        let c = closure_enumerate(&[e1], 10).unwrap().finite().unwrap();
        assert_eq!(c.order(), 2);
    }

    #[test]
    fn signed_permutations_of_rank_three() {
        let gens = vec![
            FreeAutomorphism::epsilon(1, 3).unwrap(),
            FreeAutomorphism::epsilon(2, 3).unwrap(),
            FreeAutomorphism::epsilon(3, 3).unwrap(),
            FreeAutomorphism::transposition(1, 2, 3).unwrap(),
            FreeAutomorphism::transposition(2, 3, 3).unwrap(),
        ];
        let c = closure_enumerate(&gens, DEFAULT_CLOSURE_CAP).unwrap().finite().unwrap();
        // 2^3 sign choices times 3! permutations
        assert_eq!(c.order(), 48);
        for a in &c.elements {
            for b in &c.elements {
                assert!(c.contains(&a.mul(b).unwrap()));
            }
        }
    }

    #[test]
    fn cap_exceeded_is_a_result() {
        let l12 = FreeAutomorphism::lambda(1, 2, 2).unwrap();
        assert!(matches!(
            closure_enumerate(&[l12], 50).unwrap(),
            ClosureOutcome::CapExceeded { cap: 50 }
        ));
        let e = FreeAutomorphism::epsilon(1, 2).unwrap();
        assert!(matches!(
            closure_enumerate(&[e.clone()], 1).unwrap(),
            ClosureOutcome::CapExceeded { cap: 1 }
        ));
        let mismatched = [e, FreeAutomorphism::epsilon(1, 3).unwrap()];
        assert!(closure_enumerate(&mismatched, 10).is_err());
        assert!(closure_enumerate::<FreeAutomorphism>(&[], 10).is_err());
    }
}
