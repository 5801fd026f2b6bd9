use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::{Ambient, AmbientKind, Certificate, CertifyError, GenDecl, GenDef};
use crate::group::{braid_generator, braid_sigma_m, FreeAutomorphism, GroupElement, GroupError};
use crate::matgroup::{in_saut, IntegerMatrix};

/// A generator value: a free-group automorphism or an integer matrix.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Element {
    Aut(FreeAutomorphism),
    Mat(IntegerMatrix),
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Element::Aut(a) => write!(f, "{a}"),
            Element::Mat(m) => write!(f, "{m}"),
        }
    }
}

impl GroupElement for Element {
    fn identity_like(&self) -> Self {
        match self {
            Element::Aut(a) => Element::Aut(a.identity_like()),
            Element::Mat(m) => Element::Mat(m.identity_like()),
        }
    }

    fn same_group(&self, other: &Self) -> bool {
        match (self, other) {
            (Element::Aut(a), Element::Aut(b)) => a.same_group(b),
            (Element::Mat(a), Element::Mat(b)) => a.same_group(b),
            _ => false,
        }
    }

    fn group_label(&self) -> String {
        match self {
            Element::Aut(a) => a.group_label(),
            Element::Mat(m) => m.group_label(),
        }
    }

    fn mul_unchecked(&self, other: &Self) -> Self {
        match (self, other) {
            (Element::Aut(a), Element::Aut(b)) => Element::Aut(a.mul_unchecked(b)),
            (Element::Mat(a), Element::Mat(b)) => Element::Mat(a.mul_unchecked(b)),
            _ => panic!("product of an automorphism and a matrix"),
        }
    }

    fn inverse(&self) -> Self {
        match self {
            Element::Aut(a) => Element::Aut(a.inverse()),
            Element::Mat(m) => Element::Mat(m.inverse()),
        }
    }

    fn is_identity(&self) -> bool {
        match self {
            Element::Aut(a) => a.is_identity(),
            Element::Mat(m) => m.is_identity(),
        }
    }
}

impl Element {
    pub fn as_aut(&self) -> Option<&FreeAutomorphism> {
        match self {
            Element::Aut(a) => Some(a),
            Element::Mat(_) => None,
        }
    }

    pub fn as_mat(&self) -> Option<&IntegerMatrix> {
        match self {
            Element::Mat(m) => Some(m),
            Element::Aut(_) => None,
        }
    }

    /// Determinant of the abelianization, or of the matrix.
    pub fn det_sign(&self) -> i32 {
        match self {
            Element::Aut(a) => {
                if in_saut(a) {
                    1
                } else {
                    -1
                }
            }
            Element::Mat(m) => m.determinant_sign(),
        }
    }
}

/// Named generators of a certificate, evaluated and checked against the ambient group.
#[derive(Debug, Clone)]
pub struct GeneratorTable {
    pub ambient: Ambient,
    names: Vec<String>,
    elems: Vec<Element>,
    index: HashMap<String, usize>,
    identity: Element,
}

fn gen_err(name: &str, e: impl fmt::Display) -> CertifyError {
    CertifyError::Generator {
        name: name.to_string(),
        message: e.to_string(),
    }
}

impl GeneratorTable {
    pub fn build(cert: &Certificate) -> Result<Self, CertifyError> {
        let mut table = GeneratorTable::empty(cert.ambient);
        for decl in &cert.gens {
            table.push(decl)?;
        }
        Ok(table)
    }

    pub fn empty(ambient: Ambient) -> Self {
        let identity = match ambient.kind {
            AmbientKind::Aut | AmbientKind::SAut => Element::Aut(FreeAutomorphism::identity(ambient.n)),
            AmbientKind::Gl | AmbientKind::Sl => Element::Mat(IntegerMatrix::identity(ambient.n)),
            AmbientKind::Affine => Element::Mat(IntegerMatrix::identity(ambient.n + 1)),
        };
        GeneratorTable {
            ambient,
            names: Vec::new(),
            elems: Vec::new(),
            index: HashMap::new(),
            identity,
        }
    }

    /// Adds one declaration; later declarations may refer to it in words.
    pub fn push(&mut self, decl: &GenDecl) -> Result<&Element, CertifyError> {
        if self.index.contains_key(&decl.name) {
            return Err(gen_err(&decl.name, "declared twice"));
        }
        let e = self.construct(&decl.def).map_err(|e| match e {
            CertifyError::Generator { message, .. } => gen_err(&decl.name, message),
            other => gen_err(&decl.name, other),
        })?;
        if !self.in_ambient(&e) {
            return Err(gen_err(
                &decl.name,
                format!("not an element of the ambient {} {}", self.ambient.kind.keyword(), self.ambient.n),
            ));
        }
        self.index.insert(decl.name.clone(), self.elems.len());
        self.names.push(decl.name.clone());
        self.elems.push(e);
        Ok(&self.elems[self.elems.len() - 1])
    }

    pub(crate) fn construct(&self, def: &GenDef) -> Result<Element, CertifyError> {
        let g = |e: GroupError| gen_err("", e);
        Ok(match def {
            GenDef::Nielsen { left, i, j, rank } => Element::Aut(if *left {
                FreeAutomorphism::lambda(*i, *j, *rank).map_err(g)?
            } else {
                FreeAutomorphism::rho(*i, *j, *rank).map_err(g)?
            }),
            GenDef::SignPerm { perm, flip } => {
                let mut negate = vec![false; perm.len()];
                for &f in flip {
                    if f == 0 || f > perm.len() {
                        return Err(gen_err("", format!("flip index {f} out of range")));
                    }
                    negate[f - 1] = true;
                }
                Element::Aut(FreeAutomorphism::signed_perm(perm, &negate).map_err(g)?)
            }
            GenDef::Braid { i, strands } => Element::Aut(braid_generator(*i, *strands).map_err(g)?),
            GenDef::BraidCircle { strands } => Element::Aut(braid_sigma_m(*strands).map_err(g)?),
            GenDef::Elementary { i, j, dim } => Element::Mat(IntegerMatrix::elementary(*dim, *i, *j).map_err(g)?),
            GenDef::Diag { flips, dim } => Element::Mat(IntegerMatrix::diag_sign(*dim, flips).map_err(g)?),
            GenDef::PermMatrix { perm } => Element::Mat(IntegerMatrix::permutation(perm).map_err(g)?),
            GenDef::Matrix { rows } => Element::Mat(IntegerMatrix::from_rows(rows).map_err(g)?),
            GenDef::Word(w) => self.eval(w, &[])?,
        })
    }

    pub fn in_ambient(&self, e: &Element) -> bool {
        let n = self.ambient.n;
        match (self.ambient.kind, e) {
            (AmbientKind::Aut, Element::Aut(a)) => a.rank() == n,
            (AmbientKind::SAut, Element::Aut(a)) => a.rank() == n && in_saut(a),
            (AmbientKind::Gl, Element::Mat(m)) => m.dim() == n,
            (AmbientKind::Sl, Element::Mat(m)) => m.dim() == n && m.determinant_sign() == 1,
            (AmbientKind::Affine, Element::Mat(m)) => {
                m.dim() == n + 1
                    && (1..=n).all(|c| m.entry(n + 1, c).is_zero())
                    && *m.entry(n + 1, n + 1) == BigInt::one()
            }
            _ => false,
        }
    }

    pub fn identity(&self) -> &Element {
        &self.identity
    }

    pub fn get(&self, name: &str) -> Option<&Element> {
        self.index.get(name).map(|&i| &self.elems[i])
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    /// Evaluates a word such as `"A B^-1 #2^3"`; `#k` is the `k`-th local element.
    pub fn eval(&self, word: &str, locals: &[Element]) -> Result<Element, CertifyError> {
        let werr = |m: String| CertifyError::Word {
            word: word.to_string(),
            message: m,
        };
        let mut acc = self.identity.clone();
        for tok in word.split_whitespace() {
            let (base, exp) = match tok.split_once('^') {
                Some((b, e)) => (b, e.parse::<i64>().map_err(|_| werr(format!("bad exponent in {tok}")))?),
                None => (tok, 1),
            };
            let g = if let Some(k) = base.strip_prefix('#') {
                let k: usize = k.parse().map_err(|_| werr(format!("bad local reference {base}")))?;
                if k == 0 || k > locals.len() {
                    return Err(werr(format!("local reference {base} out of range 1..={}", locals.len())));
                }
                &locals[k - 1]
            } else {
                self.get(base).ok_or_else(|| werr(format!("unknown generator {base}")))?
            };
            acc = acc.mul(&g.pow(exp)).map_err(|e| werr(e.to_string()))?;
        }
        Ok(acc)
    }

    pub fn eval_all(&self, words: &[String], locals: &[Element]) -> Result<Vec<Element>, CertifyError> {
        words.iter().map(|w| self.eval(w, locals)).collect()
    }
}
