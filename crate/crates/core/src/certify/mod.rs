//! Certificates for fixed-point derivations.
//!
//! A certificate is a tree of judgments "every isometric action on a complete
//! CAT(0) space of dimension at most `D`, satisfying the listed assumption
//! flags, fixes a point of the subgroup generated by `subject`". Each node
//! names the rule that justifies it. Geometric statements are axioms; the
//! checker verifies the group-theoretic and arithmetic hypotheses of the rule
//! and recomputes the dimension bound from the children.
//!
//! The text format is described in the crate README and printed canonically
//! by [`print`]; `parse(print(c)) == c` for every certificate.

mod bounds;
mod builtins;
mod check;
mod element;
mod mutate;
mod syntax;

use std::fmt;

use thiserror::Error;

pub use bounds::{bounds, FixDimBound};
pub use builtins::{builtin, BuiltinFamily, BUILTIN_FAMILIES};
pub use check::{check, Checker, NodeReport, Verdict};
pub use element::{Element, GeneratorTable};
pub use mutate::{apply_mutation, mutation_sites, MutationSite};
pub use syntax::{parse, print};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CertifyError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("generator {name}: {message}")]
    Generator { name: String, message: String },
    #[error("word \"{word}\": {message}")]
    Word { word: String, message: String },
    #[error("unknown builtin family {0}")]
    UnknownFamily(String),
    #[error("parameter {param} out of range for {family} (allowed {allowed})")]
    OutOfRange {
        family: String,
        param: i64,
        allowed: String,
    },
    #[error("builtin construction failed: {0}")]
    Construction(String),
}

/// Which group the certificate's generators live in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AmbientKind {
    Aut,
    SAut,
    Gl,
    Sl,
    /// Affine maps of `Z^n`, as `(n+1) × (n+1)` integer matrices.
    Affine,
}

impl AmbientKind {
    pub fn keyword(self) -> &'static str {
        match self {
            AmbientKind::Aut => "aut",
            AmbientKind::SAut => "saut",
            AmbientKind::Gl => "gl",
            AmbientKind::Sl => "sl",
            AmbientKind::Affine => "affine",
        }
    }

    pub fn from_keyword(s: &str) -> Option<Self> {
        Some(match s {
            "aut" => AmbientKind::Aut,
            "saut" => AmbientKind::SAut,
            "gl" => AmbientKind::Gl,
            "sl" => AmbientKind::Sl,
            "affine" => AmbientKind::Affine,
            _ => return None,
        })
    }

    pub fn is_free(self) -> bool {
        matches!(self, AmbientKind::Aut | AmbientKind::SAut)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Ambient {
    pub kind: AmbientKind,
    pub n: usize,
}

/// How a named generator is built.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum GenDef {
    /// `λ_ij` (`left`) or `ρ_ij` in `Aut(F_rank)`.
    Nielsen { left: bool, i: usize, j: usize, rank: usize },
    /// `x_k ↦ x_{perm[k]}`, inverted where listed in `flip`.
    SignPerm { perm: Vec<usize>, flip: Vec<usize> },
    Braid { i: usize, strands: usize },
    BraidCircle { strands: usize },
    Elementary { i: usize, j: usize, dim: usize },
    Diag { flips: Vec<usize>, dim: usize },
    PermMatrix { perm: Vec<usize> },
    Matrix { rows: Vec<Vec<i64>> },
    /// Product of earlier generators.
    Word(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GenDecl {
    pub name: String,
    pub def: GenDef,
}

/// Dimension bound of a judgment: `Any` holds in every dimension.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Dim {
    Any,
    AtMost(i64),
}

impl Dim {
    pub fn min(self, other: Dim) -> Dim {
        match (self, other) {
            (Dim::Any, d) | (d, Dim::Any) => d,
            (Dim::AtMost(a), Dim::AtMost(b)) => Dim::AtMost(a.min(b)),
        }
    }

    pub fn bound(self) -> Option<i64> {
        match self {
            Dim::Any => None,
            Dim::AtMost(d) => Some(d),
        }
    }
}

impl fmt::Display for Dim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Dim::Any => write!(f, "any"),
            Dim::AtMost(d) => write!(f, "{d}"),
        }
    }
}

/// Entry name with an optional dotted index, `conj[3.2]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Key {
    pub name: String,
    pub index: Vec<u32>,
}

impl Key {
    pub fn plain(name: &str) -> Self {
        Key {
            name: name.to_string(),
            index: Vec::new(),
        }
    }

    pub fn indexed(name: &str, index: &[u32]) -> Self {
        Key {
            name: name.to_string(),
            index: index.to_vec(),
        }
    }
}

impl fmt::Display for Key {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name)?;
        if !self.index.is_empty() {
            let idx: Vec<String> = self.index.iter().map(u32::to_string).collect();
            write!(f, "[{}]", idx.join("."))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ParamValue {
    Int(i64),
    Str(String),
    List(Vec<i64>),
}

/// One derivation step.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Node {
    pub rule: String,
    /// Words over the generator table.
    pub subject: Vec<String>,
    pub dim: Dim,
    pub flags: Vec<String>,
    pub params: Vec<(Key, ParamValue)>,
    pub sets: Vec<(Key, Vec<String>)>,
    pub witnesses: Vec<(Key, String)>,
    pub children: Vec<Node>,
}

impl Node {
    pub fn new(rule: &str, subject: Vec<String>) -> Self {
        Node {
            rule: rule.to_string(),
            subject,
            dim: Dim::Any,
            flags: Vec::new(),
            params: Vec::new(),
            sets: Vec::new(),
            witnesses: Vec::new(),
            children: Vec::new(),
        }
    }

    pub fn param(&self, key: &Key) -> Option<&ParamValue> {
        self.params.iter().find(|(k, _)| k == key).map(|(_, v)| v)
    }

    pub fn set(&self, key: &Key) -> Option<&Vec<String>> {
        self.sets.iter().find(|(k, _)| k == key).map(|(_, v)| v)
    }

    pub fn witness(&self, key: &Key) -> Option<&String> {
        self.witnesses.iter().find(|(k, _)| k == key).map(|(_, v)| v)
    }

    pub fn with_param(mut self, name: &str, value: ParamValue) -> Self {
        self.params.push((Key::plain(name), value));
        self
    }

    pub fn with_flags(mut self, flags: &[String]) -> Self {
        self.flags = flags.to_vec();
        self
    }

    pub fn with_set(mut self, key: Key, words: Vec<String>) -> Self {
        self.sets.push((key, words));
        self
    }

    pub fn with_witness(mut self, key: Key, word: impl Into<String>) -> Self {
        self.witnesses.push((key, word.into()));
        self
    }

    pub fn with_child(mut self, child: Node) -> Self {
        self.children.push(child);
        self
    }

    /// Sets the same flags on every node of the subtree.
    pub fn flag_all(&mut self, flags: &[String]) {
        self.flags = flags.to_vec();
        for c in &mut self.children {
            c.flag_all(flags);
        }
    }

    /// Number of nodes in the subtree.
    pub fn size(&self) -> usize {
        1 + self.children.iter().map(Node::size).sum::<usize>()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Certificate {
    pub name: String,
    pub ambient: Ambient,
    pub gens: Vec<GenDecl>,
    pub root: Node,
}
