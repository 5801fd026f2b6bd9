//! Exact checks for fixed-point criteria of group actions on CAT(0) spaces.
//!
//! The crate verifies the finitely checkable side of the arguments: word and
//! automorphism arithmetic in free groups, integer matrices, nerves and
//! their homology, exact rational feasibility for Helly experiments,
//! duplication-function arithmetic, and certificates that chain these checks
//! into lower bounds on `FixDim`.

pub mod group;
pub mod matgroup;
pub mod duplication;
pub mod simplicial;
pub mod convex;
pub mod certify;
