use std::collections::HashMap;

use super::check::{conjugate_set, fill_dims, k_subsets, same_set};
use super::element::{Element, GeneratorTable};
use super::{Ambient, AmbientKind, Certificate, CertifyError, GenDecl, GenDef, Key, Node, ParamValue};
use crate::group::families::{column_conjugate_families, cyclic_predecessor, dihedral_product};
use crate::group::{conjugate, FreeAutomorphism, GroupElement, NielsenKind};
use crate::matgroup::in_saut;

/// A family of builtin certificates and its parameter range.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BuiltinFamily {
    pub name: &'static str,
    pub min: i64,
    pub max: i64,
    pub description: &'static str,
}

pub const BUILTIN_FAMILIES: &[BuiltinFamily] = &[
    BuiltinFamily {
        name: "aut",
        min: 3,
        max: 12,
        description: "Aut(F_n): dihedral products, column conjugates and the Niel chain",
    },
    BuiltinFamily {
        name: "saut",
        min: 3,
        max: 12,
        description: "SAut(F_n) from elliptic Nielsen transformations (conditional)",
    },
    BuiltinFamily {
        name: "elliptic",
        min: 3,
        max: 12,
        description: "standard copies of Aut(F_3) in Aut(F_n) via torsion triples",
    },
    BuiltinFamily {
        name: "gl",
        min: 3,
        max: 7,
        description: "GL(n,Z): dihedral product, elementary matrices, index 2",
    },
    BuiltinFamily {
        name: "sl",
        min: 3,
        max: 7,
        description: "SL(n,Z): dihedral product with determinant-one involutions",
    },
    BuiltinFamily {
        name: "braid",
        min: 3,
        max: 12,
        description: "braid group B_m on its circular generators (conditional)",
    },
    BuiltinFamily {
        name: "wreath",
        min: 1,
        max: 6,
        description: "infinite dihedral group wreath the cyclic group C_d",
    },
    BuiltinFamily {
        name: "bieberbach",
        min: 1,
        max: 6,
        description: "reflections in a cube extended by coordinate permutations",
    },
    BuiltinFamily {
        name: "simplex-of-groups",
        min: 1,
        max: 6,
        description: "affine Weyl group of type A_n as an n-simplex of finite groups",
    },
];

/// Closure caps used by the builtins.
const SMALL_CAP: i64 = 64;
const PARABOLIC_CAP: i64 = 10_000;
const TRIPLE_CAP: i64 = 100_000;

/// Builds the certificate of `family` at `param`.
pub fn builtin(family: &str, param: i64) -> Result<Certificate, CertifyError> {
    let fam = BUILTIN_FAMILIES
        .iter()
        .find(|f| f.name == family)
        .ok_or_else(|| CertifyError::UnknownFamily(family.to_string()))?;
    if param < fam.min || param > fam.max {
        return Err(CertifyError::OutOfRange {
            family: family.to_string(),
            param,
            allowed: format!("{}..={}", fam.min, fam.max),
        });
    }
    let n = param as usize;
    match family {
        "aut" => aut(n, false),
        "saut" => aut(n, true),
        "elliptic" => elliptic(n),
        "gl" => linear(n, false),
        "sl" => linear(n, true),
        "braid" => braid(n),
        "wreath" => wreath(n),
        "bieberbach" => bieberbach(n),
        "simplex-of-groups" => simplex_of_groups(n),
        _ => unreachable!("family table and dispatch disagree"),
    }
}

fn construction(msg: impl Into<String>) -> CertifyError {
    CertifyError::Construction(msg.into())
}

fn int(v: i64) -> ParamValue {
    ParamValue::Int(v)
}

struct Builder {
    table: GeneratorTable,
    gens: Vec<GenDecl>,
    defs: HashMap<GenDef, String>,
}

impl Builder {
    fn new(kind: AmbientKind, n: usize) -> Self {
        Builder {
            table: GeneratorTable::empty(Ambient { kind, n }),
            gens: Vec::new(),
            defs: HashMap::new(),
        }
    }

    /// Declares `name = def`, or returns the earlier name of an identical definition.
    fn gen(&mut self, name: &str, def: GenDef) -> Result<String, CertifyError> {
        if let Some(existing) = self.defs.get(&def) {
            return Ok(existing.clone());
        }
        let decl = GenDecl {
            name: name.to_string(),
            def: def.clone(),
        };
        self.table.push(&decl)?;
        self.gens.push(decl);
        self.defs.insert(def, name.to_string());
        Ok(name.to_string())
    }

    fn nielsen(&mut self, left: bool, i: usize, j: usize) -> Result<String, CertifyError> {
        let prefix = if left { "L" } else { "R" };
        let rank = self.table.ambient.n;
        self.gen(&format!("{prefix}{i}_{j}"), GenDef::Nielsen { left, i, j, rank })
    }

    fn epsilon(&mut self, i: usize) -> Result<String, CertifyError> {
        let n = self.table.ambient.n;
        self.gen(
            &format!("E{i}"),
            GenDef::SignPerm {
                perm: (1..=n).collect(),
                flip: vec![i],
            },
        )
    }

    fn elem(&self, word: &str) -> Result<Element, CertifyError> {
        self.table.eval(word, &[])
    }

    fn elems<S: AsRef<str>>(&self, words: &[S]) -> Result<Vec<Element>, CertifyError> {
        words.iter().map(|w| self.elem(w.as_ref())).collect()
    }

    /// Declares the first candidate lying in the ambient group that `accept` admits.
    fn first(
        &mut self,
        name: &str,
        candidates: Vec<GenDef>,
        accept: impl Fn(&Element) -> bool,
    ) -> Result<String, CertifyError> {
        for def in candidates {
            let Ok(e) = self.table.construct(&def) else { continue };
            if self.table.in_ambient(&e) && accept(&e) {
                return self.gen(name, def);
            }
        }
        Err(construction(format!("no witness found for {name}")))
    }

    fn finish(self, name: String, mut root: Node) -> Result<Certificate, CertifyError> {
        fill_dims(&mut root).map_err(construction)?;
        Ok(Certificate {
            name,
            ambient: self.table.ambient,
            gens: self.gens,
            root,
        })
    }
}

fn maps_onto<'a>(from: &'a [Element], to: &'a [Element]) -> impl Fn(&Element) -> bool + 'a {
    move |g| conjugate_set(from, g).is_ok_and(|img| same_set(&img, to))
}

/// `perm` sending each anchor source to its target, the remaining sources to
/// the remaining targets in increasing order.
fn anchored_perm(n: usize, anchors: &[(usize, usize)]) -> Vec<usize> {
    let mut perm = vec![0; n];
    let mut used = vec![false; n + 1];
    for &(a, t) in anchors {
        perm[a - 1] = t;
        used[t] = true;
    }
    let mut free = (1..=n).filter(|t| !used[*t]);
    for p in perm.iter_mut() {
        if *p == 0 {
            *p = free.next().expect("anchors form a partial injection");
        }
    }
    perm
}

fn inverse_perm(perm: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; perm.len()];
    for (i, &p) in perm.iter().enumerate() {
        inv[p - 1] = i + 1;
    }
    inv
}

/// The anchored permutation and its inverse, each with every sign pattern on `pool`.
fn signed_candidates(n: usize, anchors: &[(usize, usize)], pool: &[usize]) -> Vec<(Vec<usize>, Vec<usize>)> {
    let mut pool = pool.to_vec();
    pool.sort_unstable();
    pool.dedup();
    let fwd = anchored_perm(n, anchors);
    let bwd = inverse_perm(&fwd);
    let mut perms = vec![fwd];
    if perms[0] != bwd {
        perms.push(bwd);
    }
    let mut out = Vec::new();
    for mask in 0..1usize << pool.len() {
        let flips: Vec<usize> = (0..pool.len()).filter(|b| mask >> b & 1 == 1).map(|b| pool[b]).collect();
        for p in &perms {
            out.push((p.clone(), flips.clone()));
        }
    }
    out
}

fn signperm_candidates(n: usize, anchors: &[(usize, usize)], pool: &[usize]) -> Vec<GenDef> {
    signed_candidates(n, anchors, pool)
        .into_iter()
        .map(|(perm, flip)| GenDef::SignPerm { perm, flip })
        .collect()
}

/// Signed permutation matrices `e_i ↦ ±e_{π(i)}`, padded with fixed coordinates up to `size`.
fn matrix_candidates(n: usize, size: usize, anchors: &[(usize, usize)], pool: &[usize]) -> Vec<GenDef> {
    signed_candidates(n, anchors, pool)
        .into_iter()
        .map(|(perm, flip)| GenDef::Matrix {
            rows: signed_perm_rows(&perm, &flip, size),
        })
        .collect()
}

fn signed_perm_rows(perm: &[usize], flip: &[usize], size: usize) -> Vec<Vec<i64>> {
    let mut rows = vec![vec![0i64; size]; size];
    for i in 1..=size {
        let target = perm.get(i - 1).copied().unwrap_or(i);
        rows[target - 1][i - 1] = if flip.contains(&i) { -1 } else { 1 };
    }
    rows
}

/// Reads a signed permutation back out of an automorphism.
fn signperm_def(a: &FreeAutomorphism) -> Result<GenDef, CertifyError> {
    let mut perm = Vec::with_capacity(a.rank());
    let mut flip = Vec::new();
    for i in 1..=a.rank() {
        match a.image(i).letters() {
            [l] => {
                perm.push(l.index());
                if !l.is_positive() {
                    flip.push(i);
                }
            }
            _ => return Err(construction(format!("x_{i} is not sent to a basis letter"))),
        }
    }
    Ok(GenDef::SignPerm { perm, flip })
}

fn aut(n: usize, special: bool) -> Result<Certificate, CertifyError> {
    let kind = if special { AmbientKind::SAut } else { AmbientKind::Aut };
    let mut b = Builder::new(kind, n);
    let mut niel: Vec<Vec<String>> = Vec::with_capacity(n);
    for l in 1..=n {
        let p = cyclic_predecessor(l, n);
        niel.push(vec![b.nielsen(true, l, p)?, b.nielsen(false, l, p)?]);
    }
    let lambdas: Vec<String> = (1..n).map(|j| b.nielsen(true, n, j)).collect::<Result<_, _>>()?;
    let rhos: Vec<String> = (1..n).map(|j| b.nielsen(false, n, j)).collect::<Result<_, _>>()?;

    let niel_elems: Vec<Vec<Element>> = niel.iter().map(|s| b.elems(s)).collect::<Result<_, _>>()?;
    let cycle: Vec<usize> = (1..=n).map(|i| i % n + 1).collect();
    let mut shift_candidates = Vec::new();
    for perm in [cycle.clone(), inverse_perm(&cycle)] {
        for flip in [vec![], vec![1]] {
            shift_candidates.push(GenDef::SignPerm {
                perm: perm.clone(),
                flip,
            });
        }
    }
    let shift = b.first("SH", shift_candidates, |g| {
        (0..n).all(|l| maps_onto(&niel_elems[l], &niel_elems[(l + 1) % n])(g))
    })?;

    let a = b.elems(&lambdas)?;
    let mut ample = Node::new("AMPLE", lambdas.clone())
        .with_param("d", int(2 * n as i64 - 5))
        .with_param("k0", int(1))
        .with_param("f", ParamValue::Str(format!("column {n}")));
    for j in 1..n - 1 {
        let pos = a[j - 1].clone();
        let next = a[j].clone();
        let a_ref = &a;
        let name = b.first(
            &format!("SW{j}"),
            signperm_candidates(n, &[(j, j + 1), (j + 1, j)], &[j, j + 1]),
            move |g| {
                maps_onto(a_ref, a_ref)(g) && conjugate(&pos, g).is_ok_and(|x| x == next || x == next.inverse())
            },
        )?;
        ample = ample.with_witness(Key::indexed("sym", &[j as u32]), name);
    }
    let e1 = FreeAutomorphism::epsilon(1, n).map_err(|e| construction(e.to_string()))?;
    for k in 2..n {
        let j = (k - 1) as u32;
        ample.params.push((Key::indexed("rep", &[j]), ParamValue::List((1..=k as i64).collect())));
        let families = column_conjugate_families(n, k).map_err(|e| construction(e.to_string()))?;
        for (r, fam) in families.iter().enumerate().skip(1) {
            let mut g = fam.conjugator.clone();
            if special && !in_saut(&g) {
                g = e1.mul(&g).map_err(|e| construction(e.to_string()))?;
            }
            let name = b.gen(&format!("C{k}_{r}"), signperm_def(&g)?)?;
            ample = ample.with_witness(Key::indexed("conj", &[j, r as u32]), name);
        }
    }

    let base = if special {
        Node::new("ASSUME", vec![lambdas[0].clone()]).with_param("flag", ParamValue::Str("nielsen-elliptic".into()))
    } else {
        dihedral_base(&mut b, n, &lambdas[0])?
    };
    let ample = ample.with_child(base);

    let flip1n = b.gen(
        &format!("F1_{n}"),
        GenDef::SignPerm {
            perm: (1..=n).collect(),
            flip: vec![1, n],
        },
    )?;
    let rho_node = Node::new("CONJUGATE", rhos.clone())
        .with_witness(Key::plain("conj"), flip1n)
        .with_child(ample.clone());
    let mut m_gens = lambdas.clone();
    m_gens.extend(rhos.iter().cloned());
    let commute = Node::new("COMMUTE", m_gens).with_child(ample).with_child(rho_node);

    let chain_subject: Vec<String> = niel[1..].concat();
    let chain = Node::new("NIELSEN_CHAIN", chain_subject)
        .with_witness(Key::plain("shift"), shift.clone())
        .with_child(commute);

    let mut delta = Node::new("DELTA", niel.concat()).with_param("d", int(n as i64 - 2));
    for (i, s) in niel.iter().enumerate() {
        delta = delta.with_set(Key::indexed("A", &[i as u32 + 1]), s.clone());
    }
    for sub in k_subsets(n, n - 1) {
        let missing = (0..n).find(|i| !sub.contains(i)).expect("one index is left out");
        let child = if missing == 0 {
            chain.clone()
        } else {
            let subject: Vec<String> = sub.iter().flat_map(|&i| niel[i].clone()).collect();
            Node::new("CONJUGATE", subject)
                .with_witness(Key::plain("conj"), format!("{shift}^{missing}"))
                .with_child(chain.clone())
        };
        delta = delta.with_child(child);
    }

    if special {
        delta.flag_all(&["nielsen-elliptic".to_string()]);
        b.finish(format!("saut-{n}"), delta)
    } else {
        let mut subject = delta.subject.clone();
        subject.push(b.epsilon(1)?);
        let root = Node::new("FINITE_INDEX", subject)
            .with_param("index", int(2))
            .with_child(delta);
        b.finish(format!("aut-{n}"), root)
    }
}

/// `{λ_{n1}}` from the dihedral product: ρ_12 is a product of the two torsion
/// generators of the first factor, and is conjugate to λ_{n1}.
fn dihedral_base(b: &mut Builder, n: usize, target: &str) -> Result<Node, CertifyError> {
    let factors = dihedral_product(n).map_err(|e| construction(e.to_string()))?;
    let mut sets: Vec<Vec<String>> = Vec::new();
    for f in &factors {
        let eps = b.epsilon(f.j)?;
        let nu = b.nielsen(f.kind == NielsenKind::Left, f.i, f.j)?;
        sets.push(vec![eps.clone(), format!("{nu} {eps}")]);
    }
    let first = b.elems(&sets[0])?;
    let mut product = Node::new("PRODUCT", sets[0].clone())
        .with_param("cap", int(SMALL_CAP))
        .with_param("target", int(1));
    for (i, s) in sets.iter().enumerate() {
        product = product.with_set(Key::indexed("factor", &[i as u32 + 1]), s.clone());
    }
    let (fi, fj) = (factors[0].i, factors[0].j);
    for (idx, f) in factors.iter().enumerate().skip(1) {
        let to = b.elems(&sets[idx])?;
        let name = b.first(
            &format!("P{}", idx + 1),
            signperm_candidates(n, &[(fi, f.i), (fj, f.j)], &[fi, fj, f.i, f.j]),
            maps_onto(&first, &to),
        )?;
        product = product.with_witness(Key::indexed("conj", &[idx as u32 + 1]), name);
    }
    let nu0 = b.nielsen(factors[0].kind == NielsenKind::Left, fi, fj)?;
    let sub = Node::new("SUBGROUP", vec![nu0.clone()])
        .with_witness(Key::indexed("member", &[1]), "#2 #1")
        .with_child(product);
    let from = b.elems(&[nu0])?;
    let to = b.elems(&[target])?;
    let g = b.first(
        "G",
        signperm_candidates(n, &[(1, n), (2, 1)], &[1, 2, n]),
        maps_onto(&from, &to),
    )?;
    Ok(Node::new("CONJUGATE", vec![target.to_string()])
        .with_witness(Key::plain("conj"), g)
        .with_child(sub))
}

fn elliptic(n: usize) -> Result<Certificate, CertifyError> {
    let mut b = Builder::new(AmbientKind::Aut, n);
    let m = n / 3;
    let fe = |e: crate::group::GroupError| construction(e.to_string());
    let mut blocks: Vec<[Vec<String>; 3]> = Vec::with_capacity(m);
    for blk in 0..m {
        let a = 3 * blk + 1;
        let t = |i, j| FreeAutomorphism::transposition(i, j, n);
        let e = |i| FreeAutomorphism::epsilon(i, n);
        let eta = t(a, a + 1).and_then(|x| x.mul(&e(a)?)).and_then(|x| x.mul(&e(a + 1)?)).map_err(fe)?;
        let tau = t(a + 1, a + 2).and_then(|x| x.mul(&e(a)?)).map_err(fe)?;
        let eps = b.epsilon(a + 2)?;
        let eta = b.gen(&format!("H{}", blk + 1), signperm_def(&eta)?)?;
        let tau = b.gen(&format!("U{}", blk + 1), signperm_def(&tau)?)?;
        let rho = b.nielsen(false, a, a + 1)?;
        let eps2 = b.epsilon(a + 1)?;
        let theta = b.gen(&format!("Q{}", blk + 1), GenDef::Word(format!("{rho} {eps2}")))?;
        blocks.push([vec![eps, eta], vec![theta], vec![tau]]);
    }
    let mut triples = Node::new("TRIPLES", blocks[0].concat()).with_param("target", int(1));
    for (i, blk) in blocks.iter().enumerate() {
        for (j, s) in blk.iter().enumerate() {
            triples = triples.with_set(Key::indexed("A", &[i as u32 + 1, j as u32 + 1]), s.clone());
        }
    }
    let first: Vec<Element> = b.elems(&blocks[0].concat())?;
    for i in 1..m {
        let to = b.elems(&blocks[i].concat())?;
        let anchors: Vec<(usize, usize)> = (1..=3).flat_map(|k| [(k, 3 * i + k), (3 * i + k, k)]).collect();
        let parts: Vec<Vec<Element>> = blocks[0].iter().map(|s| b.elems(s)).collect::<Result<_, _>>()?;
        let targets: Vec<Vec<Element>> = blocks[i].iter().map(|s| b.elems(s)).collect::<Result<_, _>>()?;
        let name = b.first(&format!("B{}", i + 1), signperm_candidates(n, &anchors, &[]), |g| {
            maps_onto(&first, &to)(g) && parts.iter().zip(&targets).all(|(p, t)| maps_onto(p, t)(g))
        })?;
        triples = triples.with_witness(Key::indexed("conj", &[i as u32 + 1]), name);
    }
    for blk in &blocks {
        for (x, y) in [(0, 1), (0, 2), (1, 2)] {
            let subject = [blk[x].clone(), blk[y].clone()].concat();
            triples = triples.with_child(Node::new("FINITE", subject).with_param("cap", int(TRIPLE_CAP)));
        }
    }
    b.finish(format!("elliptic-{n}"), triples)
}

fn linear(n: usize, special: bool) -> Result<Certificate, CertifyError> {
    let kind = if special { AmbientKind::Sl } else { AmbientKind::Gl };
    let mut b = Builder::new(kind, n);
    let mut all_e = Vec::new();
    for i in 1..=n {
        for j in 1..=n {
            if i != j {
                all_e.push(b.gen(&format!("E{i}_{j}"), GenDef::Elementary { i, j, dim: n })?);
            }
        }
    }
    // involutions inverting E_{in}
    let (rows, flips): (Vec<usize>, Box<dyn Fn(usize) -> Vec<usize>>) = if !special {
        ((1..n).collect(), Box::new(|i| vec![i]))
    } else if n % 2 == 1 {
        ((1..n).collect(), Box::new(move |i| (1..=n).filter(|&k| k != i).collect()))
    } else {
        ((2..n).collect(), Box::new(|i| vec![1, i]))
    };
    let mut sets = Vec::new();
    for &i in &rows {
        let t = b.gen(&format!("T{i}"), GenDef::Diag { flips: flips(i), dim: n })?;
        sets.push(vec![t.clone(), format!("{t} E{i}_{n}")]);
    }
    let first = b.elems(&sets[0])?;
    let mut product = Node::new("PRODUCT", sets[0].clone())
        .with_param("cap", int(SMALL_CAP))
        .with_param("target", int(1));
    for (k, s) in sets.iter().enumerate() {
        product = product.with_set(Key::indexed("factor", &[k as u32 + 1]), s.clone());
    }
    let r0 = rows[0];
    let pool: Vec<usize> = (1..=n).collect();
    for (k, &i) in rows.iter().enumerate().skip(1) {
        let to = b.elems(&sets[k])?;
        let cands = if special {
            matrix_candidates(n, n, &[(r0, i), (i, r0)], &pool)
        } else {
            matrix_candidates(n, n, &[(r0, i), (i, r0)], &[])
        };
        let name = b.first(&format!("P{}", k + 1), cands, maps_onto(&first, &to))?;
        product = product.with_witness(Key::indexed("conj", &[k as u32 + 1]), name);
    }
    let sub = Node::new("SUBGROUP", vec![format!("E{r0}_{n}")])
        .with_witness(Key::indexed("member", &[1]), "#1 #2")
        .with_child(product);
    let eenough = Node::new("EENOUGH", all_e.clone()).with_child(sub);
    if special {
        b.finish(format!("sl-{n}"), eenough)
    } else {
        let mut subject = all_e;
        subject.push("T1".to_string());
        let root = Node::new("FINITE_INDEX", subject)
            .with_param("index", int(2))
            .with_child(eenough);
        b.finish(format!("gl-{n}"), root)
    }
}

fn braid(m: usize) -> Result<Certificate, CertifyError> {
    let mut b = Builder::new(AmbientKind::Aut, m);
    let mut sigma: Vec<String> = (1..m)
        .map(|i| b.gen(&format!("S{i}"), GenDef::Braid { i, strands: m }))
        .collect::<Result<_, _>>()?;
    sigma.push(b.gen(&format!("S{m}"), GenDef::BraidCircle { strands: m })?);
    let rot = b.gen("D", GenDef::Word(sigma[..m - 1].join(" ")))?;
    let elems = b.elems(&sigma)?;
    let up = |word: &str| -> Result<bool, CertifyError> {
        let g = b.elem(word)?;
        Ok((0..m).all(|i| {
            conjugate(&elems[i], &g).is_ok_and(|x| x == elems[(i + 1) % m] || x == elems[(i + 1) % m].inverse())
        }))
    };
    let dir: i64 = if up(&rot)? {
        1
    } else if up(&format!("{rot}^-1"))? {
        -1
    } else {
        return Err(construction("the rotation does not cycle the generators"));
    };

    let mut ample = Node::new("AMPLE", sigma.clone())
        .with_param("d", int((m / 3) as i64 - 1))
        .with_param("k0", int(1))
        .with_param("f", ParamValue::Str(format!("blocks {m}")))
        .with_witness(Key::indexed("sym", &[1]), rot.clone());
    let full = (1usize << m) - 1;
    let rotate = |mask: usize| ((mask << 1) | (mask >> (m - 1))) & full;
    let mut j = 0u32;
    for mask in 1..=full {
        if mask.count_ones() < 2 {
            continue;
        }
        let mut canonical = mask;
        let mut r = mask;
        for _ in 0..m {
            r = rotate(r);
            canonical = canonical.min(r);
        }
        if canonical != mask {
            continue;
        }
        j += 1;
        let idx: Vec<i64> = (0..m).filter(|i| mask >> i & 1 == 1).map(|i| i as i64 + 1).collect();
        let k = idx.len();
        ample.params.push((Key::indexed("rep", &[j]), ParamValue::List(idx.clone())));
        if mask == (1usize << k) - 1 {
            let copies = m / (k + 1);
            for r in 1..copies {
                let e = dir * (r * (k + 1)) as i64;
                ample = ample.with_witness(Key::indexed("conj", &[j, r as u32]), format!("{rot}^{e}"));
            }
        } else {
            // the first cyclic run against the rest
            let start = (0..m).find(|&i| mask >> i & 1 == 1 && mask >> ((i + m - 1) % m) & 1 == 0).expect("not the full circle");
            let mut run = Vec::new();
            let mut i = start;
            while mask >> i & 1 == 1 {
                run.push(i + 1);
                i = (i + 1) % m;
            }
            let rest: Vec<String> = idx
                .iter()
                .filter(|&&x| !run.contains(&(x as usize)))
                .map(i64::to_string)
                .collect();
            let run: Vec<String> = run.iter().map(usize::to_string).collect();
            ample = ample.with_witness(
                Key::indexed("split", &[j]),
                format!("{} | {}", run.join(" "), rest.join(" ")),
            );
        }
    }
    let base = Node::new("ASSUME", vec![sigma[0].clone()])
        .with_param("flag", ParamValue::Str("braid-generators-elliptic".into()));
    let mut root = ample.with_child(base);
    root.flag_all(&["braid-generators-elliptic".to_string()]);
    b.finish(format!("braid-{m}"), root)
}

/// `r_i : x_i ↦ -x_i` and `s_i : x_i ↦ 1 - x_i` on `Z^n`.
fn reflections(b: &mut Builder, n: usize) -> Result<Vec<Vec<String>>, CertifyError> {
    (1..=n)
        .map(|i| {
            let r = b.gen(&format!("R{i}"), GenDef::Diag { flips: vec![i], dim: n + 1 })?;
            let mut rows = signed_perm_rows(&[], &[i], n + 1);
            rows[i - 1][n] = 1;
            let s = b.gen(&format!("S{i}"), GenDef::Matrix { rows })?;
            Ok(vec![r, s])
        })
        .collect()
}

fn wreath(d: usize) -> Result<Certificate, CertifyError> {
    let mut b = Builder::new(AmbientKind::Affine, d);
    let pairs = reflections(&mut b, d)?;
    let mut cycle: Vec<usize> = (1..=d).map(|i| i % d + 1).collect();
    cycle.push(d + 1);
    let c = b.gen("C", GenDef::PermMatrix { perm: cycle })?;
    let mut node = Node::new("CONJ_BOOTSTRAP", pairs.concat())
        .with_param("k", int(1))
        .with_param("n", int(d as i64))
        .with_set(Key::plain("S"), pairs[0].clone());
    for i in 2..=d {
        node = node.with_witness(Key::indexed("conj", &[i as u32]), format!("{c}^{}", i - 1));
    }
    for g in &pairs[0] {
        node = node.with_child(Node::new("FINITE", vec![g.clone()]).with_param("cap", int(SMALL_CAP)));
    }
    let mut subject = node.subject.clone();
    if d > 1 {
        subject.push(c);
    }
    let root = Node::new("FINITE_INDEX", subject)
        .with_param("index", int(d as i64))
        .with_child(node);
    b.finish(format!("wreath-{d}"), root)
}

fn bieberbach(n: usize) -> Result<Certificate, CertifyError> {
    let mut b = Builder::new(AmbientKind::Affine, n);
    let pairs = reflections(&mut b, n)?;
    let first = b.elems(&pairs[0])?;
    let mut swaps = Vec::new();
    for i in 2..=n {
        let to = b.elems(&pairs[i - 1])?;
        swaps.push(b.first(
            &format!("P{i}"),
            matrix_candidates(n, n + 1, &[(1, i), (i, 1)], &[]),
            maps_onto(&first, &to),
        )?);
    }
    let product = |target: usize| {
        let mut p = Node::new("PRODUCT", pairs[target - 1].clone())
            .with_param("cap", int(SMALL_CAP))
            .with_param("target", int(target as i64));
        for (i, s) in pairs.iter().enumerate() {
            p = p.with_set(Key::indexed("factor", &[i as u32 + 1]), s.clone());
        }
        for (i, w) in swaps.iter().enumerate() {
            p = p.with_witness(Key::indexed("conj", &[i as u32 + 2]), w.clone());
        }
        p
    };
    let cube = if n == 1 {
        product(1)
    } else {
        (1..=n).fold(Node::new("COMMUTE", pairs.concat()), |acc, t| acc.with_child(product(t)))
    };
    let mut subject = pairs.concat();
    subject.extend(swaps);
    let index: i64 = (1..=n as i64).product();
    let root = Node::new("FINITE_INDEX", subject)
        .with_param("index", int(index))
        .with_child(cube);
    b.finish(format!("bieberbach-{n}"), root)
}

fn simplex_of_groups(n: usize) -> Result<Certificate, CertifyError> {
    // Z^{n+1} with the affine reflections of type Ã_n
    let dim = n + 1;
    let mut b = Builder::new(AmbientKind::Affine, dim);
    let mut rows = signed_perm_rows(&[], &[], dim + 1);
    rows[0][0] = 0;
    rows[0][n] = 1;
    rows[0][dim] = 1;
    rows[n][n] = 0;
    rows[n][0] = 1;
    rows[n][dim] = -1;
    let mut gens = vec![b.gen("W0", GenDef::Matrix { rows })?];
    for i in 1..=n {
        let mut perm: Vec<usize> = (1..=dim + 1).collect();
        perm.swap(i - 1, i);
        gens.push(b.gen(&format!("W{i}"), GenDef::PermMatrix { perm })?);
    }
    let mut delta = Node::new("DELTA", gens.clone()).with_param("d", int(n as i64 - 1));
    for (i, g) in gens.iter().enumerate() {
        delta = delta.with_set(Key::indexed("A", &[i as u32 + 1]), vec![g.clone()]);
    }
    for sub in k_subsets(gens.len(), n) {
        let subject: Vec<String> = sub.iter().map(|&i| gens[i].clone()).collect();
        delta = delta.with_child(Node::new("FINITE", subject).with_param("cap", int(PARABOLIC_CAP)));
    }
    b.finish(format!("simplex-of-groups-{n}"), delta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certify::{check, parse, print};

    fn verified_dim(family: &str, p: i64) -> Option<i64> {
        let cert = builtin(family, p).unwrap();
        let v = check(&cert);
        assert!(v.verified, "{family} {p}: {:?}", v.first_failure);
        v.dim
    }

    #[test]
    fn ranges_are_enforced() {
        assert!(matches!(builtin("aut", 2), Err(CertifyError::OutOfRange { .. })));
        assert!(matches!(builtin("aut", 13), Err(CertifyError::OutOfRange { .. })));
        assert!(matches!(builtin("nope", 3), Err(CertifyError::UnknownFamily(_))));
    }

    #[test]
    fn small_aut_certificates() {
        // n = 3m, 3m+1 give 2m-1; n = 3m+2 gives 2m
        assert_eq!(verified_dim("aut", 3), Some(1));
        assert_eq!(verified_dim("aut", 4), Some(1));
        assert_eq!(verified_dim("aut", 5), Some(2));
        assert_eq!(verified_dim("aut", 6), Some(3));
    }

    #[test]
    fn saut_is_conditional() {
        let cert = builtin("saut", 5).unwrap();
        let v = check(&cert);
        assert!(v.verified, "{:?}", v.first_failure);
        assert_eq!(v.dim, Some(3));
        assert_eq!(v.flags, vec!["nielsen-elliptic".to_string()]);
    }

    #[test]
    fn matrix_certificates() {
        for n in 3..=5 {
            assert_eq!(verified_dim("gl", n), Some(n - 2));
        }
        assert_eq!(verified_dim("sl", 3), Some(1));
        assert_eq!(verified_dim("sl", 4), Some(1));
        assert_eq!(verified_dim("sl", 5), Some(3));
    }

    #[test]
    fn affine_certificates() {
        for d in 1..=3 {
            assert_eq!(verified_dim("wreath", d), Some(d - 1));
            assert_eq!(verified_dim("bieberbach", d), Some(d - 1));
            assert_eq!(verified_dim("simplex-of-groups", d), Some(d - 1));
        }
    }

    #[test]
    fn braid_certificates() {
        for m in 3..=7 {
            assert_eq!(verified_dim("braid", m), Some((m / 3) as i64 - 1));
        }
    }

    #[test]
    fn elliptic_small() {
        assert_eq!(verified_dim("elliptic", 3), Some(1));
        assert_eq!(verified_dim("elliptic", 6), Some(3));
    }

    #[test]
    fn builtins_round_trip_through_text() {
        for (f, p) in [("aut", 4), ("gl", 3), ("braid", 5), ("wreath", 3), ("simplex-of-groups", 2)] {
            let cert = builtin(f, p).unwrap();
            assert_eq!(parse(&print(&cert)).unwrap(), cert, "{f} {p}");
        }
    }
}
