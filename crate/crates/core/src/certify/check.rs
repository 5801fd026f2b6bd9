use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use rayon::prelude::*;
use serde::Serialize;

use super::element::{Element, GeneratorTable};
use super::{AmbientKind, Certificate, Dim, Key, Node, ParamValue};
use crate::duplication::{condition2_failures, DuplicationFn, DuplicationSpec};
use crate::group::families::{column_product_generators, in_column_product, niel, nielsen_derivation_gaps};
use crate::group::{
    braid_generator, braid_sigma_m, closure_enumerate, commutes, conjugate, normalizes, ClosureOutcome,
    ConjugateSide, FreeAutomorphism, GenWord, GroupElement, Membership, NielsenKind, WitnessTable,
};
use crate::matgroup::IntegerMatrix;

/// Largest generating set for which AMPLE and NORM2 enumerate all subsets.
pub const MAX_EXHAUSTIVE_GENERATORS: usize = 20;

/// Outcome of checking one node.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NodeReport {
    /// `root`, `root.2`, `root.2.1`, … (children are numbered from 1).
    pub path: String,
    pub rule: String,
    pub ok: bool,
    /// Recomputed dimension bound (`None` for "any").
    pub dim: Option<i64>,
    pub message: String,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Verdict {
    pub certificate: String,
    pub verified: bool,
    pub dim: Option<i64>,
    pub flags: Vec<String>,
    pub nodes: Vec<NodeReport>,
    /// First node in pre-order that failed for a reason of its own.
    pub first_failure: Option<NodeReport>,
}

impl Verdict {
    pub fn conclusion(&self) -> String {
        if !self.verified {
            return match &self.first_failure {
                Some(f) => format!("rejected at {} ({}): {}", f.path, f.rule, f.message),
                None => "rejected".to_string(),
            };
        }
        let mut s = match self.dim {
            None => "fixed point in every dimension".to_string(),
            Some(d) => format!("fixed point whenever dim ≤ {d} (dim < {})", d + 1),
        };
        if !self.flags.is_empty() {
            s.push_str(&format!(" [conditional on: {}]", self.flags.join(", ")));
        }
        s
    }
}

#[derive(Debug)]
struct SubResult {
    ok: bool,
    dim: Dim,
    reports: Vec<(Vec<usize>, NodeReport)>,
}

struct RuleOk {
    dim: Dim,
    notes: Vec<String>,
}

type RuleResult = Result<RuleOk, String>;

/// Checks certificates over one generator table, caching verdicts of
/// identical subtrees.
pub struct Checker {
    table: GeneratorTable,
    cache: Mutex<HashMap<Node, Arc<SubResult>>>,
}

/// Checks a certificate from scratch.
pub fn check(cert: &Certificate) -> Verdict {
    match Checker::new(cert) {
        Ok(c) => c.check(cert),
        Err(msg) => {
            let report = NodeReport {
                path: "gens".to_string(),
                rule: "GEN".to_string(),
                ok: false,
                dim: None,
                message: msg,
                notes: Vec::new(),
            };
            Verdict {
                certificate: cert.name.clone(),
                verified: false,
                dim: None,
                flags: cert.root.flags.clone(),
                nodes: vec![report.clone()],
                first_failure: Some(report),
            }
        }
    }
}

impl Checker {
    pub fn new(cert: &Certificate) -> Result<Self, String> {
        let table = GeneratorTable::build(cert).map_err(|e| e.to_string())?;
        Ok(Checker {
            table,
            cache: Mutex::new(HashMap::new()),
        })
    }

    /// Checks a certificate whose generator table matches the one this
    /// checker was built from.
    pub fn check(&self, cert: &Certificate) -> Verdict {
        let res = self.check_node(&cert.root);
        let nodes: Vec<NodeReport> = res
            .reports
            .iter()
            .map(|(path, r)| {
                let mut r = r.clone();
                r.path = path_text(path);
                r
            })
            .collect();
        let first_failure = nodes
            .iter()
            .find(|r| !r.ok && !r.message.starts_with(CHILD_REJECTED))
            .or_else(|| nodes.iter().find(|r| !r.ok))
            .cloned();
        Verdict {
            certificate: cert.name.clone(),
            verified: res.ok,
            dim: res.dim.bound(),
            flags: cert.root.flags.clone(),
            nodes,
            first_failure,
        }
    }

    fn check_node(&self, node: &Node) -> Arc<SubResult> {
        if let Some(hit) = self.cache.lock().expect("cache lock").get(node) {
            return hit.clone();
        }
        let children: Vec<Arc<SubResult>> = node.children.par_iter().map(|c| self.check_node(c)).collect();
        let outcome = if let Some(i) = children.iter().position(|c| !c.ok) {
            Err(format!("{CHILD_REJECTED} (child {})", i + 1))
        } else {
            self.check_own(node, &children)
        };
        let (ok, dim, message, notes) = match outcome {
            Ok(r) => (true, r.dim, "ok".to_string(), r.notes),
            Err(m) => (false, node.dim, m, Vec::new()),
        };
        let mut reports = vec![(
            Vec::new(),
            NodeReport {
                path: String::new(),
                rule: node.rule.clone(),
                ok,
                dim: dim.bound(),
                message,
                notes,
            },
        )];
        for (i, c) in children.iter().enumerate() {
            for (p, r) in &c.reports {
                let mut path = Vec::with_capacity(p.len() + 1);
                path.push(i + 1);
                path.extend(p);
                reports.push((path, r.clone()));
            }
        }
        let res = Arc::new(SubResult { ok, dim, reports });
        self.cache
            .lock()
            .expect("cache lock")
            .insert(node.clone(), res.clone());
        res
    }

    fn check_own(&self, node: &Node, children: &[Arc<SubResult>]) -> RuleResult {
        for (i, c) in node.children.iter().enumerate() {
            if let Some(f) = c.flags.iter().find(|f| !node.flags.contains(f)) {
                return Err(format!("child {} assumes flag {f} not carried by this node", i + 1));
            }
        }
        let dims: Vec<Dim> = children.iter().map(|c| c.dim).collect();
        let ctx = Ctx {
            table: &self.table,
            node,
            child_dims: &dims,
        };
        let out = match node.rule.as_str() {
            "FINITE" => ctx.finite(),
            "ASSUME" => ctx.assume(),
            "EENOUGH" => ctx.eenough(),
            "CONJUGATE" => ctx.conjugate_rule(),
            "SUBGROUP" => ctx.subgroup(),
            "NORM" => ctx.norm(),
            "COMMUTE" => ctx.commute(),
            "FINITE_INDEX" => ctx.finite_index(),
            "DELTA" => ctx.delta(),
            "BOOTSTRAP" => ctx.bootstrap(),
            "CONJ_BOOTSTRAP" => ctx.conj_bootstrap(),
            "PRODUCT" => ctx.product(),
            "TRIPLES" => ctx.triples(),
            "AMPLE" => ctx.ample(),
            "NIELSEN_CHAIN" => ctx.nielsen_chain(),
            "NORM2" => ctx.norm2(),
            other => Err(format!("unknown rule {other}")),
        }?;
        let expected = rule_dim(node, &dims)?;
        if expected != out.dim {
            return Err(format!("internal dimension mismatch {expected} vs {}", out.dim));
        }
        if node.dim != out.dim {
            return Err(format!("claimed dim = {} but the rule yields {}", node.dim, out.dim));
        }
        Ok(out)
    }
}

const CHILD_REJECTED: &str = "child rejected";

fn path_text(path: &[usize]) -> String {
    let mut s = "root".to_string();
    for i in path {
        s.push('.');
        s.push_str(&i.to_string());
    }
    s
}

fn min_dims(dims: &[Dim]) -> Dim {
    dims.iter().fold(Dim::Any, |acc, d| acc.min(*d))
}

fn int_param(node: &Node, name: &str) -> Result<i64, String> {
    match node.param(&Key::plain(name)) {
        Some(ParamValue::Int(v)) => Ok(*v),
        Some(_) => Err(format!("param {name} must be an integer")),
        None => Err(format!("missing param {name}")),
    }
}

fn opt_int_param(node: &Node, name: &str, default: i64) -> Result<i64, String> {
    match node.param(&Key::plain(name)) {
        None => Ok(default),
        Some(_) => int_param(node, name),
    }
}

fn str_param(node: &Node, name: &str) -> Result<String, String> {
    match node.param(&Key::plain(name)) {
        Some(ParamValue::Str(s)) => Ok(s.clone()),
        Some(_) => Err(format!("param {name} must be a string")),
        None => Err(format!("missing param {name}")),
    }
}

fn list_param(node: &Node, key: &Key) -> Result<Vec<i64>, String> {
    match node.param(key) {
        Some(ParamValue::List(v)) => Ok(v.clone()),
        Some(_) => Err(format!("param {key} must be a list")),
        None => Err(format!("missing param {key}")),
    }
}

/// Entries `name[1]`, `name[2]`, … of one kind, which must be numbered contiguously.
fn numbered<'a, T>(entries: &'a [(Key, T)], name: &str) -> Result<Vec<&'a T>, String> {
    let mut found: Vec<(u32, &T)> = entries
        .iter()
        .filter(|(k, _)| k.name == name)
        .map(|(k, v)| match k.index.as_slice() {
            [i] => Ok((*i, v)),
            _ => Err(format!("{k} must carry a single index")),
        })
        .collect::<Result<_, _>>()?;
    found.sort_by_key(|(i, _)| *i);
    for (pos, (i, _)) in found.iter().enumerate() {
        if *i as usize != pos + 1 {
            return Err(format!("{name}[..] entries must be numbered 1, 2, … without gaps"));
        }
    }
    Ok(found.into_iter().map(|(_, v)| v).collect())
}

/// The number of factors implied by a dimension-carrying rule's data.
pub(crate) fn rule_dim(node: &Node, child_dims: &[Dim]) -> Result<Dim, String> {
    let children = min_dims(child_dims);
    Ok(match node.rule.as_str() {
        "FINITE" | "ASSUME" => Dim::Any,
        "EENOUGH" | "CONJUGATE" | "SUBGROUP" | "FINITE_INDEX" | "NIELSEN_CHAIN" | "NORM" | "COMMUTE" => children,
        "DELTA" | "AMPLE" => children.min(Dim::AtMost(int_param(node, "d")?)),
        "BOOTSTRAP" => {
            let k = list_param(node, &Key::plain("k"))?;
            children.min(Dim::AtMost(k.iter().sum::<i64>() - 1))
        }
        "CONJ_BOOTSTRAP" => {
            let k = int_param(node, "k")?;
            let n = int_param(node, "n")?;
            children.min(Dim::AtMost(n * k - 1))
        }
        "PRODUCT" => {
            let p = numbered(&node.sets, "factor")?.len() as i64;
            Dim::AtMost(p - 1)
        }
        "TRIPLES" => {
            let d = node
                .sets
                .iter()
                .filter(|(k, _)| k.name == "A")
                .filter_map(|(k, _)| k.index.first())
                .max()
                .copied()
                .unwrap_or(0) as i64;
            children.min(Dim::AtMost(2 * d - 1))
        }
        "NORM2" => children.min(Dim::AtMost(int_param(node, "d")? - 1)),
        other => return Err(format!("unknown rule {other}")),
    })
}

/// Fills in every node's `dim` from the rules, bottom-up.
pub(crate) fn fill_dims(node: &mut Node) -> Result<Dim, String> {
    let mut dims = Vec::with_capacity(node.children.len());
    for c in &mut node.children {
        dims.push(fill_dims(c)?);
    }
    node.dim = rule_dim(node, &dims)?;
    Ok(node.dim)
}

fn contains_up_to_inverse(set: &[Element], e: &Element) -> bool {
    let inv = e.inverse();
    set.iter().any(|x| x == e || *x == inv)
}

fn position_up_to_inverse(set: &[Element], e: &Element) -> Option<usize> {
    let inv = e.inverse();
    set.iter().position(|x| x == e || *x == inv)
}

/// Equality of generating sets up to order and inverting individual elements.
pub(crate) fn same_set(a: &[Element], b: &[Element]) -> bool {
    a.iter().all(|x| contains_up_to_inverse(b, x)) && b.iter().all(|x| contains_up_to_inverse(a, x))
}

pub(crate) fn union(sets: &[&[Element]]) -> Vec<Element> {
    let mut out: Vec<Element> = Vec::new();
    for s in sets {
        for e in s.iter() {
            if !contains_up_to_inverse(&out, e) {
                out.push(e.clone());
            }
        }
    }
    out
}

fn cross_commute(sets: &[Vec<Element>], what: &str) -> Result<(), String> {
    for i in 0..sets.len() {
        for j in i + 1..sets.len() {
            for (a, x) in sets[i].iter().enumerate() {
                for (b, y) in sets[j].iter().enumerate() {
                    if !commutes(x, y).map_err(|e| e.to_string())? {
                        return Err(format!(
                            "{what} {} and {} do not commute (elements {} and {})",
                            i + 1,
                            j + 1,
                            a + 1,
                            b + 1
                        ));
                    }
                }
            }
        }
    }
    Ok(())
}

pub(crate) fn conjugate_set(set: &[Element], g: &Element) -> Result<Vec<Element>, String> {
    set.iter()
        .map(|h| conjugate(h, g).map_err(|e| e.to_string()))
        .collect()
}

/// Lexicographic `k`-subsets of `0..n`.
pub(crate) fn k_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.clone());
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if idx[i] < n - k + i {
                break;
            }
            if i == 0 {
                return out;
            }
        }
        if idx[i] >= n - k + i {
            return out;
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Local word over `#1, #2, …` as `(index, exponent)` pairs.
fn local_word(word: &str, bound: usize) -> Result<GenWord, String> {
    word.split_whitespace()
        .map(|tok| {
            let (base, exp) = match tok.split_once('^') {
                Some((b, e)) => (b, e.parse::<i64>().map_err(|_| format!("bad exponent in {tok}"))?),
                None => (tok, 1),
            };
            let k: usize = base
                .strip_prefix('#')
                .and_then(|k| k.parse().ok())
                .ok_or_else(|| format!("expected #k, found {tok}"))?;
            if k == 0 || k > bound {
                return Err(format!("{tok} out of range 1..={bound}"));
            }
            Ok((k - 1, exp))
        })
        .collect()
}

fn index_list(text: &str, bound: usize) -> Result<Vec<usize>, String> {
    text.split_whitespace()
        .map(|t| {
            let i: usize = t.parse().map_err(|_| format!("bad index {t}"))?;
            if i == 0 || i > bound {
                return Err(format!("index {i} out of range 1..={bound}"));
            }
            Ok(i - 1)
        })
        .collect()
}

fn parse_duplication_fn(text: &str) -> Result<DuplicationFn, String> {
    let parts: Vec<&str> = text.split_whitespace().collect();
    let num = |s: &str| s.parse::<u64>().map_err(|_| format!("bad number {s} in duplication function"));
    match parts.as_slice() {
        ["blocks", m] => Ok(DuplicationFn::Blocks { m: num(m)? }),
        ["column", n] => Ok(DuplicationFn::Column { n: num(n)? }),
        ["lickorish", g] => Ok(DuplicationFn::Lickorish { genus: num(g)? }),
        ["constant", c] => Ok(DuplicationFn::Constant(num(c)?)),
        ["table", first, values @ ..] => Ok(DuplicationFn::Table {
            first: num(first)?,
            values: values.iter().map(|v| num(v)).collect::<Result<_, _>>()?,
        }),
        _ => Err(format!("unknown duplication function \"{text}\"")),
    }
}

/// Orbits of subsets (as bitmasks) under index permutations.
struct SubsetOrbits {
    n: usize,
    perms: Vec<Vec<usize>>,
    seen: Vec<bool>,
}

impl SubsetOrbits {
    fn new(n: usize, perms: Vec<Vec<usize>>) -> Self {
        SubsetOrbits {
            n,
            perms,
            seen: vec![false; 1usize << n],
        }
    }

    fn image(&self, mask: usize, perm: &[usize]) -> usize {
        (0..self.n)
            .filter(|i| mask >> i & 1 == 1)
            .fold(0, |acc, i| acc | 1 << perm[i])
    }

    fn mark_orbit(&mut self, mask: usize) {
        if self.seen[mask] {
            return;
        }
        let mut stack = vec![mask];
        self.seen[mask] = true;
        while let Some(m) = stack.pop() {
            for p in 0..self.perms.len() {
                let img = self.image(m, &self.perms[p]);
                if !self.seen[img] {
                    self.seen[img] = true;
                    stack.push(img);
                }
            }
        }
    }

    fn first_uncovered(&self, sizes: std::ops::RangeInclusive<usize>) -> Option<usize> {
        (1..1usize << self.n).find(|&m| sizes.contains(&(m.count_ones() as usize)) && !self.seen[m])
    }
}

fn mask_text(mask: usize, n: usize) -> String {
    let idx: Vec<String> = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| (i + 1).to_string()).collect();
    format!("{{{}}}", idx.join(", "))
}

struct Ctx<'a> {
    table: &'a GeneratorTable,
    node: &'a Node,
    child_dims: &'a [Dim],
}

impl Ctx<'_> {
    fn eval_words(&self, words: &[String]) -> Result<Vec<Element>, String> {
        self.table.eval_all(words, &[]).map_err(|e| e.to_string())
    }

    fn subject(&self) -> Result<Vec<Element>, String> {
        self.eval_words(&self.node.subject)
    }

    fn child_subject(&self, i: usize) -> Result<Vec<Element>, String> {
        self.eval_words(&self.node.children[i].subject)
    }

    fn expect_children(&self, n: usize) -> Result<(), String> {
        if self.node.children.len() != n {
            return Err(format!("expected {n} children, found {}", self.node.children.len()));
        }
        Ok(())
    }

    fn witness_element(&self, key: &Key) -> Result<Element, String> {
        let w = self.node.witness(key).ok_or_else(|| format!("missing witness {key}"))?;
        self.table.eval(w, &[]).map_err(|e| e.to_string())
    }

    fn numbered_sets(&self, name: &str) -> Result<Vec<Vec<Element>>, String> {
        numbered(&self.node.sets, name)?
            .into_iter()
            .map(|s| self.eval_words(s))
            .collect()
    }

    fn subject_is(&self, expected: &[Element], what: &str) -> Result<(), String> {
        let subject = self.subject()?;
        if same_set(&subject, expected) {
            Ok(())
        } else {
            Err(format!("subject is not {what}"))
        }
    }

    fn children_dim(&self) -> Dim {
        min_dims(self.child_dims)
    }

    fn ok(&self, dim: Dim, notes: Vec<String>) -> RuleResult {
        Ok(RuleOk { dim, notes })
    }

    fn ambient_rank(&self) -> Result<usize, String> {
        if self.table.ambient.kind.is_free() {
            Ok(self.table.ambient.n)
        } else {
            Err("rule needs an Aut(F_n) or SAut(F_n) ambient".to_string())
        }
    }

    fn finite(&self) -> RuleResult {
        self.expect_children(0)?;
        let cap = int_param(self.node, "cap")?;
        let cap = usize::try_from(cap).map_err(|_| "cap must be non-negative".to_string())?;
        let subject = self.subject()?;
        if subject.is_empty() {
            return self.ok(Dim::Any, vec!["trivial group".to_string()]);
        }
        match closure_enumerate(&subject, cap).map_err(|e| e.to_string())? {
            ClosureOutcome::Finite(c) => self.ok(Dim::Any, vec![format!("finite group of order {}", c.order())]),
            ClosureOutcome::CapExceeded { cap } => Err(format!("closure exceeds cap {cap}")),
        }
    }

    fn assume(&self) -> RuleResult {
        self.expect_children(0)?;
        let flag = str_param(self.node, "flag")?;
        if !self.node.flags.contains(&flag) {
            return Err(format!("assumption {flag} is not among the node's flags"));
        }
        let subject = self.subject()?;
        let n = self.table.ambient.n;
        let single = || -> Result<&Element, String> {
            match subject.as_slice() {
                [e] => Ok(e),
                _ => Err(format!("{flag} needs a single-element subject")),
            }
        };
        let is_nielsen = |e: &Element| -> Result<bool, String> {
            let Some(a) = e.as_aut() else { return Ok(false) };
            for kind in [NielsenKind::Left, NielsenKind::Right] {
                for i in 1..=a.rank() {
                    for j in 1..=a.rank() {
                        if i != j && FreeAutomorphism::nielsen(kind, i, j, a.rank()).map_err(|e| e.to_string())? == *a {
                            return Ok(true);
                        }
                    }
                }
            }
            Ok(false)
        };
        let braid_gens = || -> Result<Vec<Element>, String> {
            let mut v: Vec<Element> = (1..n)
                .map(|i| braid_generator(i, n).map(Element::Aut))
                .collect::<Result<_, _>>()
                .map_err(|e| e.to_string())?;
            v.push(Element::Aut(braid_sigma_m(n).map_err(|e| e.to_string())?));
            Ok(v)
        };
        let note = match flag.as_str() {
            "nielsen-elliptic" => {
                if !is_nielsen(single()?)? {
                    return Err("subject is not a Nielsen transformation".to_string());
                }
                "assumption: this Nielsen transformation is elliptic"
            }
            "semisimple" => {
                let e = single()?;
                let is_elementary = e.as_mat().is_some_and(|m| {
                    n >= 3
                        && self.table.ambient.kind != AmbientKind::Affine
                        && (1..=n).any(|i| {
                            (1..=n).any(|j| i != j && IntegerMatrix::elementary(n, i, j).is_ok_and(|x| x == *m))
                        })
                });
                if is_elementary {
                    "assumption: the action is semisimple (elementary matrices are then elliptic)"
                } else if n >= 4 && is_nielsen(e)? {
                    "assumption: the action is semisimple (Nielsen transformations are then elliptic, cited)"
                } else {
                    return Err("semisimple needs a Nielsen transformation of rank ≥ 4 or an elementary matrix of size ≥ 3".to_string());
                }
            }
            "braid-generators-elliptic" => {
                let e = single()?;
                if !self.table.ambient.kind.is_free() || !braid_gens()?.contains(e) {
                    return Err("subject is not a braid generator σ_i".to_string());
                }
                "assumption: each braid generator is elliptic"
            }
            "b3-elliptic" => {
                if !self.table.ambient.kind.is_free() {
                    return Err("b3-elliptic needs a braid ambient".to_string());
                }
                let sig = braid_gens()?;
                let m = sig.len();
                let adjacent = (0..m).any(|i| {
                    let pair = [sig[i].clone(), sig[(i + 1) % m].clone()];
                    subject.len() == 2 && subject.iter().all(|e| pair.contains(e)) && subject[0] != subject[1]
                });
                if !adjacent {
                    return Err("subject is not an adjacent pair σ_i, σ_{i+1}".to_string());
                }
                "assumption: a subgroup ⟨σ_i, σ_{i+1}⟩ is elliptic"
            }
            other => return Err(format!("unknown assumption flag {other}")),
        };
        self.ok(Dim::Any, vec![format!("unverified geometric input; {note}")])
    }

    fn eenough(&self) -> RuleResult {
        self.expect_children(1)?;
        let n = self.table.ambient.n;
        if !matches!(self.table.ambient.kind, AmbientKind::Gl | AmbientKind::Sl) || n < 3 {
            return Err("EENOUGH needs a GL(n,Z) or SL(n,Z) ambient with n ≥ 3".to_string());
        }
        let mut all = Vec::new();
        for i in 1..=n {
            for j in 1..=n {
                if i != j {
                    all.push(Element::Mat(IntegerMatrix::elementary(n, i, j).map_err(|e| e.to_string())?));
                }
            }
        }
        let child = self.child_subject(0)?;
        if child.len() != 1 || !all.contains(&child[0]) {
            return Err("child subject must be a single elementary matrix".to_string());
        }
        self.subject_is(&all, "the set of all elementary matrices")?;
        self.ok(
            self.children_dim(),
            vec!["cited: elementary matrices are conjugate and boundedly generate SL(n,Z)".to_string()],
        )
    }

    fn conjugate_rule(&self) -> RuleResult {
        self.expect_children(1)?;
        let g = self.witness_element(&Key::plain("conj"))?;
        let image = conjugate_set(&self.child_subject(0)?, &g)?;
        self.subject_is(&image, "the conjugate of the child subject by witness conj")?;
        self.ok(self.children_dim(), Vec::new())
    }

    fn subgroup(&self) -> RuleResult {
        self.expect_children(1)?;
        let locals = self.child_subject(0)?;
        let subject = self.subject()?;
        for (i, s) in subject.iter().enumerate() {
            let key = Key::indexed("member", &[i as u32 + 1]);
            let w = self.node.witness(&key).ok_or_else(|| format!("missing witness {key}"))?;
            let e = self.table.eval(w, &locals).map_err(|e| e.to_string())?;
            if e != *s {
                return Err(format!("witness {key} does not evaluate to subject element {}", i + 1));
            }
        }
        self.ok(self.children_dim(), Vec::new())
    }

    fn norm(&self) -> RuleResult {
        self.expect_children(2)?;
        let h1 = self.child_subject(0)?;
        let h2 = self.child_subject(1)?;
        let mode = str_param(self.node, "membership")?;
        let failure = match mode.as_str() {
            "column" => {
                let n = self.ambient_rank()?;
                let m: Vec<Element> = column_product_generators(n)
                    .map_err(|e| e.to_string())?
                    .into_iter()
                    .map(Element::Aut)
                    .collect();
                if !same_set(&h1, &m) {
                    return Err("column membership needs the first child to be the column product".to_string());
                }
                let decide = |e: &Element| e.as_aut().is_some_and(in_column_product);
                normalizes(&h2, &h1, &Membership::Decide(&decide)).map_err(|e| e.to_string())?
            }
            "finite" => {
                let cap = usize::try_from(int_param(self.node, "cap")?).map_err(|_| "bad cap".to_string())?;
                let closure = closure_enumerate(&h1, cap)
                    .map_err(|e| e.to_string())?
                    .finite()
                    .ok_or_else(|| format!("first child generates more than {cap} elements"))?;
                let elems: std::collections::HashSet<Element> = closure.elements.into_iter().collect();
                let decide = |e: &Element| elems.contains(e);
                normalizes(&h2, &h1, &Membership::Decide(&decide)).map_err(|e| e.to_string())?
            }
            "witness" => {
                let mut table = WitnessTable::default();
                for (key, word) in &self.node.witnesses {
                    if key.name != "rewrite" {
                        continue;
                    }
                    let [g, h, s] = key.index.as_slice() else {
                        return Err(format!("{key} must be indexed [outer.inner.side]"));
                    };
                    let side = match s {
                        1 => ConjugateSide::ByInverse,
                        2 => ConjugateSide::ByElement,
                        _ => return Err(format!("{key}: side must be 1 or 2")),
                    };
                    if *g == 0 || *h == 0 {
                        return Err(format!("{key}: indices start at 1"));
                    }
                    table
                        .entries
                        .insert((*g as usize - 1, *h as usize - 1, side), local_word(word, h1.len())?);
                }
                normalizes(&h2, &h1, &Membership::Witnesses(&table)).map_err(|e| e.to_string())?
            }
            other => return Err(format!("unknown membership mode {other}")),
        };
        if let Some(f) = failure {
            return Err(format!(
                "conjugate of first-child element {} by second-child element {} ({:?}) lies outside",
                f.inner + 1,
                f.outer + 1,
                f.side
            ));
        }
        self.subject_is(&union(&[&h1, &h2]), "the union of the child subjects")?;
        self.ok(self.children_dim(), Vec::new())
    }

    fn commute(&self) -> RuleResult {
        if self.node.children.len() < 2 {
            return Err("COMMUTE needs at least two children".to_string());
        }
        let sets: Vec<Vec<Element>> = (0..self.node.children.len())
            .map(|i| self.child_subject(i))
            .collect::<Result<_, _>>()?;
        cross_commute(&sets, "child subjects")?;
        let refs: Vec<&[Element]> = sets.iter().map(Vec::as_slice).collect();
        self.subject_is(&union(&refs), "the union of the child subjects")?;
        self.ok(self.children_dim(), Vec::new())
    }

    fn finite_index(&self) -> RuleResult {
        self.expect_children(1)?;
        let index = int_param(self.node, "index")?;
        if index < 1 {
            return Err("index must be positive".to_string());
        }
        let child = self.child_subject(0)?;
        let subject = self.subject()?;
        if let Some(i) = child.iter().position(|e| !contains_up_to_inverse(&subject, e)) {
            return Err(format!("child subject element {} is missing from the subject", i + 1));
        }
        let kind = self.table.ambient.kind;
        let note = if index == 2 && matches!(kind, AmbientKind::Aut | AmbientKind::Gl) {
            if let Some(i) = child.iter().position(|e| e.det_sign() != 1) {
                return Err(format!("child subject element {} has determinant -1", i + 1));
            }
            if kind == AmbientKind::Aut {
                let auts: Vec<FreeAutomorphism> = child.iter().filter_map(|e| e.as_aut().cloned()).collect();
                let gaps = nielsen_derivation_gaps(&auts).map_err(|e| e.to_string())?;
                if let Some((kind, i, k)) = gaps.first() {
                    return Err(format!(
                        "child subject does not generate SAut: {:?} Nielsen generator ({i},{k}) not derived",
                        kind
                    ));
                }
            } else {
                let n = self.table.ambient.n;
                for i in 1..=n {
                    for j in 1..=n {
                        if i != j {
                            let e = Element::Mat(IntegerMatrix::elementary(n, i, j).map_err(|e| e.to_string())?);
                            if !child.contains(&e) {
                                return Err(format!("child subject lacks the elementary matrix E_{i}{j}"));
                            }
                        }
                    }
                }
            }
            if !subject.iter().any(|e| e.det_sign() == -1) {
                return Err("subject has no element of determinant -1".to_string());
            }
            "index 2 verified: child generates the determinant-one subgroup".to_string()
        } else {
            format!("declared index {index} (not machine-checked)")
        };
        self.ok(self.children_dim(), vec![note])
    }

    fn delta(&self) -> RuleResult {
        let d = int_param(self.node, "d")?;
        if d < 0 {
            return Err("d must be non-negative".to_string());
        }
        let sets = self.numbered_sets("A")?;
        if sets.is_empty() {
            return Err("DELTA needs sets A[1..]".to_string());
        }
        let size = (d as usize + 1).min(sets.len());
        let subsets = k_subsets(sets.len(), size);
        self.expect_children(subsets.len())?;
        for (c, sub) in subsets.iter().enumerate() {
            let parts: Vec<&[Element]> = sub.iter().map(|&i| sets[i].as_slice()).collect();
            if !same_set(&self.child_subject(c)?, &union(&parts)) {
                return Err(format!("child {} is not the union of sets {:?}", c + 1, sub.iter().map(|i| i + 1).collect::<Vec<_>>()));
            }
        }
        let all: Vec<&[Element]> = sets.iter().map(Vec::as_slice).collect();
        self.subject_is(&union(&all), "the union of the sets A[i]")?;
        self.ok(self.children_dim().min(Dim::AtMost(d)), Vec::new())
    }

    fn check_subset_children(&self, sets: &[Vec<Element>], ks: &[usize], start: usize) -> Result<usize, String> {
        let mut c = start;
        for (i, (set, &k)) in sets.iter().zip(ks).enumerate() {
            if set.len() < k {
                return Err(format!("set {} has fewer than {k} elements", i + 1));
            }
            for sub in k_subsets(set.len(), k) {
                if c >= self.node.children.len() {
                    return Err("too few children for the required subsets".to_string());
                }
                let expected: Vec<Element> = sub.iter().map(|&j| set[j].clone()).collect();
                if !same_set(&self.child_subject(c)?, &expected) {
                    return Err(format!("child {} is not the expected {k}-subset of set {}", c + 1, i + 1));
                }
                c += 1;
            }
        }
        Ok(c)
    }

    fn conjugates_onto(&self, base: &[Vec<Element>], targets: &[Vec<Vec<Element>>]) -> Result<(), String> {
        for (t, target) in targets.iter().enumerate() {
            let key = Key::indexed("conj", &[t as u32 + 2]);
            let g = self.witness_element(&key)?;
            for (b, tgt) in base.iter().zip(target) {
                if !same_set(&conjugate_set(b, &g)?, tgt) {
                    return Err(format!("witness {key} does not map factor 1 onto factor {}", t + 2));
                }
            }
        }
        Ok(())
    }

    fn bootstrap(&self) -> RuleResult {
        let k = list_param(self.node, &Key::plain("k"))?;
        let sets = self.numbered_sets("S")?;
        if k.len() != sets.len() || k.is_empty() || k.iter().any(|&x| x < 1) {
            return Err("param k must list one positive integer per set S[i]".to_string());
        }
        cross_commute(&sets, "sets")?;
        let ks: Vec<usize> = k.iter().map(|&x| x as usize).collect();
        let used = self.check_subset_children(&sets, &ks, 0)?;
        self.expect_children(used)?;
        let target = opt_int_param(self.node, "target", 1)?;
        if target < 1 || target as usize > sets.len() {
            return Err("target out of range".to_string());
        }
        if sets.len() > 1 {
            let targets: Vec<Vec<Vec<Element>>> = sets[1..].iter().map(|s| vec![s.clone()]).collect();
            self.conjugates_onto(&[sets[0].clone()], &targets)
                .map_err(|e| format!("disjunctive conclusion unresolved: {e}"))?;
        }
        self.subject_is(&sets[target as usize - 1], "the target set")?;
        let total: i64 = k.iter().sum();
        self.ok(self.children_dim().min(Dim::AtMost(total - 1)), Vec::new())
    }

    fn conj_bootstrap(&self) -> RuleResult {
        let k = int_param(self.node, "k")?;
        let n = int_param(self.node, "n")?;
        if k < 1 || n < 1 {
            return Err("k and n must be positive".to_string());
        }
        let s = self.eval_words(self.node.set(&Key::plain("S")).ok_or("missing set S")?)?;
        let mut family = vec![s.clone()];
        for i in 2..=n {
            let g = self.witness_element(&Key::indexed("conj", &[i as u32]))?;
            family.push(conjugate_set(&s, &g)?);
        }
        for i in 0..family.len() {
            for j in i + 1..family.len() {
                if same_set(&family[i], &family[j]) {
                    return Err(format!("conjugates {} and {} coincide", i + 1, j + 1));
                }
            }
        }
        cross_commute(&family, "conjugates")?;
        let used = self.check_subset_children(&[s], &[k as usize], 0)?;
        self.expect_children(used)?;
        let refs: Vec<&[Element]> = family.iter().map(Vec::as_slice).collect();
        self.subject_is(&union(&refs), "the union of the conjugates")?;
        self.ok(self.children_dim().min(Dim::AtMost(n * k - 1)), Vec::new())
    }

    fn product(&self) -> RuleResult {
        self.expect_children(0)?;
        let factors = self.numbered_sets("factor")?;
        if factors.is_empty() {
            return Err("PRODUCT needs sets factor[1..]".to_string());
        }
        let cap = usize::try_from(int_param(self.node, "cap")?).map_err(|_| "bad cap".to_string())?;
        for (i, f) in factors.iter().enumerate() {
            for (j, g) in f.iter().enumerate() {
                if closure_enumerate(std::slice::from_ref(g), cap)
                    .map_err(|e| e.to_string())?
                    .order()
                    .is_none()
                {
                    return Err(format!("generator {} of factor {} has order above cap {cap}", j + 1, i + 1));
                }
            }
        }
        cross_commute(&factors, "factors")?;
        let targets: Vec<Vec<Vec<Element>>> = factors[1..].iter().map(|f| vec![f.clone()]).collect();
        self.conjugates_onto(&[factors[0].clone()], &targets)?;
        let target = opt_int_param(self.node, "target", 1)?;
        if target < 1 || target as usize > factors.len() {
            return Err("target out of range".to_string());
        }
        self.subject_is(&factors[target as usize - 1], "the target factor")?;
        self.ok(
            Dim::AtMost(factors.len() as i64 - 1),
            vec![format!("{} factors generated by elements of finite order", factors.len())],
        )
    }

    fn triples(&self) -> RuleResult {
        let mut d = 0u32;
        for (k, _) in self.node.sets.iter().filter(|(k, _)| k.name == "A") {
            match k.index.as_slice() {
                [i, j] if (1..=3).contains(j) && *i >= 1 => d = d.max(*i),
                _ => return Err(format!("{k} must be indexed [factor.1..3]")),
            }
        }
        if d == 0 {
            return Err("TRIPLES needs sets A[i.j]".to_string());
        }
        let mut factors: Vec<Vec<Vec<Element>>> = Vec::new();
        for i in 1..=d {
            let mut parts = Vec::new();
            for j in 1..=3 {
                let words = self
                    .node
                    .set(&Key::indexed("A", &[i, j]))
                    .ok_or_else(|| format!("missing set A[{i}.{j}]"))?;
                parts.push(self.eval_words(words)?);
            }
            factors.push(parts);
        }
        let unions: Vec<Vec<Element>> = factors
            .iter()
            .map(|p| union(&[&p[0], &p[1], &p[2]]))
            .collect();
        cross_commute(&unions, "factors")?;
        self.conjugates_onto(&factors[0], &factors[1..])?;
        self.expect_children(3 * d as usize)?;
        let mut c = 0;
        for parts in &factors {
            for (a, b) in [(0, 1), (0, 2), (1, 2)] {
                if !same_set(&self.child_subject(c)?, &union(&[&parts[a], &parts[b]])) {
                    return Err(format!("child {} is not the expected pair union", c + 1));
                }
                c += 1;
            }
        }
        let target = opt_int_param(self.node, "target", 1)?;
        if target < 1 || target > d as i64 {
            return Err("target out of range".to_string());
        }
        self.subject_is(&unions[target as usize - 1], "the target factor")?;
        self.ok(self.children_dim().min(Dim::AtMost(2 * d as i64 - 1)), Vec::new())
    }

    /// Permutations of `set` induced by conjugating with each `sym[i]`.
    fn symmetry_perms(&self, set: &[Element]) -> Result<Vec<Vec<usize>>, String> {
        numbered(&self.node.witnesses, "sym")?
            .iter()
            .enumerate()
            .map(|(s, w)| {
                let g = self.table.eval(w, &[]).map_err(|e| e.to_string())?;
                let mut perm = Vec::with_capacity(set.len());
                for (i, a) in set.iter().enumerate() {
                    let img = conjugate(a, &g).map_err(|e| e.to_string())?;
                    let j = position_up_to_inverse(set, &img)
                        .ok_or_else(|| format!("sym[{}] moves generator {} outside the set", s + 1, i + 1))?;
                    perm.push(j);
                }
                let mut sorted = perm.clone();
                sorted.sort_unstable();
                sorted.dedup();
                if sorted.len() != set.len() {
                    return Err(format!("sym[{}] does not permute the set", s + 1));
                }
                Ok(perm)
            })
            .collect()
    }

    fn subset_mask(&self, subset: &[Element], set: &[Element]) -> Result<usize, String> {
        let mut mask = 0usize;
        for e in subset {
            let i = position_up_to_inverse(set, e).ok_or("child subject is not a subset of the generators")?;
            mask |= 1 << i;
        }
        Ok(mask)
    }

    fn ample(&self) -> RuleResult {
        let d = int_param(self.node, "d")?;
        let k0 = int_param(self.node, "k0")?;
        if d < 0 || k0 < 1 {
            return Err("need d ≥ 0 and k0 ≥ 1".to_string());
        }
        let f = parse_duplication_fn(&str_param(self.node, "f")?)?;
        let a = self.subject()?;
        let n = a.len();
        if n == 0 || n > MAX_EXHAUSTIVE_GENERATORS {
            return Err(format!("generating set size {n} outside 1..={MAX_EXHAUSTIVE_GENERATORS}"));
        }
        for i in 0..n {
            if position_up_to_inverse(&a, &a[i]) != Some(i) {
                return Err(format!("generator {} repeats an earlier one", i + 1));
            }
        }
        let spec = DuplicationSpec {
            d,
            k0: k0 as u64,
            generator_count: n as u64,
            f: f.clone(),
        };
        let failures = condition2_failures(&spec);
        if !failures.is_empty() {
            return Err(format!("condition (2) fails at k = {failures:?}"));
        }
        let perms = self.symmetry_perms(&a)?;
        let reps: Vec<(u32, Vec<i64>)> = self
            .node
            .params
            .iter()
            .filter(|(k, _)| k.name == "rep")
            .map(|(k, v)| match (k.index.as_slice(), v) {
                ([j], ParamValue::List(l)) => Ok((*j, l.clone())),
                _ => Err(format!("{k} must be rep[j] = [indices]")),
            })
            .collect::<Result<_, _>>()?;
        let mut orbits = SubsetOrbits::new(n, perms.clone());
        for (j, rep) in &reps {
            let idx: Vec<usize> = rep
                .iter()
                .map(|&i| {
                    if i < 1 || i as usize > n {
                        Err(format!("rep[{j}] index {i} out of range"))
                    } else {
                        Ok(i as usize - 1)
                    }
                })
                .collect::<Result<_, _>>()?;
            let mask = idx.iter().fold(0usize, |m, &i| m | 1 << i);
            let k = mask.count_ones() as usize;
            if k != idx.len() || k as i64 <= k0 {
                return Err(format!("rep[{j}] must list more than k0 distinct generators"));
            }
            let s: Vec<Element> = idx.iter().map(|&i| a[i].clone()).collect();
            if let Some(split) = self.node.witness(&Key::indexed("split", &[*j])) {
                let (left, right) = split
                    .split_once('|')
                    .ok_or_else(|| format!("split[{j}] must have the form \"i .. | j ..\""))?;
                let left = index_list(left, n)?;
                let right = index_list(right, n)?;
                let lm = left.iter().fold(0usize, |m, &i| m | 1 << i);
                let rm = right.iter().fold(0usize, |m, &i| m | 1 << i);
                if left.is_empty() || right.is_empty() || lm & rm != 0 || lm | rm != mask {
                    return Err(format!("split[{j}] is not a partition of rep[{j}] into non-empty parts"));
                }
                let parts = vec![
                    left.iter().map(|&i| a[i].clone()).collect(),
                    right.iter().map(|&i| a[i].clone()).collect(),
                ];
                cross_commute(&parts, &format!("split[{j}] parts"))?;
            } else {
                let mut family = vec![s.clone()];
                let mut r = 1;
                while let Some(w) = self.node.witness(&Key::indexed("conj", &[*j, r])) {
                    let g = self.table.eval(w, &[]).map_err(|e| e.to_string())?;
                    family.push(conjugate_set(&s, &g)?);
                    r += 1;
                }
                let need = f.eval(k as u64).ok_or_else(|| format!("f({k}) undefined"))? as usize;
                if family.len() < need {
                    return Err(format!(
                        "rep[{j}] has {} commuting conjugates, f({k}) = {need}",
                        family.len()
                    ));
                }
                for x in 0..family.len() {
                    for y in x + 1..family.len() {
                        if same_set(&family[x], &family[y]) {
                            return Err(format!("rep[{j}]: conjugates {} and {} coincide", x + 1, y + 1));
                        }
                    }
                }
                cross_commute(&family, &format!("rep[{j}] conjugates"))?;
            }
            orbits.mark_orbit(mask);
        }
        if let Some(m) = orbits.first_uncovered(k0 as usize + 1..=n) {
            return Err(format!("subset {} is not in the orbit of any rep", mask_text(m, n)));
        }
        let mut base = SubsetOrbits::new(n, perms);
        for c in 0..self.node.children.len() {
            let mask = self.subset_mask(&self.child_subject(c)?, &a)?;
            if mask == 0 || mask.count_ones() as i64 > k0 {
                return Err(format!("child {} must be a subset of at most k0 generators", c + 1));
            }
            base.mark_orbit(mask);
        }
        if let Some(m) = base.first_uncovered(1..=(k0 as usize).min(n)) {
            return Err(format!("base subset {} is not covered by a child", mask_text(m, n)));
        }
        self.ok(
            self.children_dim().min(Dim::AtMost(d)),
            vec![format!("{} orbit representatives cover all subsets of size > {k0}", reps.len())],
        )
    }

    fn nielsen_chain(&self) -> RuleResult {
        self.expect_children(1)?;
        let n = self.ambient_rank()?;
        if n < 3 {
            return Err("NIELSEN_CHAIN needs rank ≥ 3".to_string());
        }
        let m: Vec<Element> = column_product_generators(n)
            .map_err(|e| e.to_string())?
            .into_iter()
            .map(Element::Aut)
            .collect();
        if !same_set(&self.child_subject(0)?, &m) {
            return Err("child subject must generate the column product M".to_string());
        }
        let niels: Vec<Vec<Element>> = (2..=n)
            .map(|l| niel(l, n).map(|p| p.into_iter().map(Element::Aut).collect()))
            .collect::<Result<_, _>>()
            .map_err(|e| e.to_string())?;
        let shift = self.witness_element(&Key::plain("shift"))?;
        for (i, pair) in niels.iter().enumerate().take(niels.len() - 1) {
            if !same_set(&conjugate_set(pair, &shift)?, &niels[i + 1]) {
                return Err(format!("witness shift does not carry Niel_{} to Niel_{}", i + 2, i + 3));
            }
        }
        if !niels[n - 2].iter().all(|e| e.as_aut().is_some_and(in_column_product)) {
            return Err("Niel_n is not contained in M".to_string());
        }
        let decide = |e: &Element| e.as_aut().is_some_and(in_column_product);
        for (i, pair) in niels.iter().enumerate() {
            if let Some(f) = normalizes(pair, &m, &Membership::Decide(&decide)).map_err(|e| e.to_string())? {
                return Err(format!(
                    "Niel_{} does not normalize M (generator {}, {:?})",
                    i + 2,
                    f.inner + 1,
                    f.side
                ));
            }
        }
        for s in 0..niels.len() {
            for t in s + 2..niels.len() {
                cross_commute(&[niels[s].clone(), niels[t].clone()], "Niel sets")
                    .map_err(|_| format!("Niel_{} and Niel_{} do not commute", s + 2, t + 2))?;
            }
        }
        let refs: Vec<&[Element]> = niels.iter().map(Vec::as_slice).collect();
        self.subject_is(&union(&refs), "the union of Niel_2, …, Niel_n")?;
        self.ok(
            self.children_dim(),
            vec![format!("Niel_l normalizes M for l = 2..{n}")],
        )
    }

    fn norm2(&self) -> RuleResult {
        let d = int_param(self.node, "d")?;
        if d < 1 {
            return Err("d must be positive".to_string());
        }
        let n = self.ambient_rank()?;
        let a = self.subject()?;
        if a.is_empty() || a.len() > MAX_EXHAUSTIVE_GENERATORS {
            return Err("generating set size out of range".to_string());
        }
        self.expect_children(1 + a.len())?;
        let m: Vec<Element> = column_product_generators(n)
            .map_err(|e| e.to_string())?
            .into_iter()
            .map(Element::Aut)
            .collect();
        if !same_set(&self.child_subject(0)?, &m) {
            return Err("first child must be the column product M".to_string());
        }
        for (i, x) in a.iter().enumerate() {
            if !same_set(&self.child_subject(i + 1)?, std::slice::from_ref(x)) {
                return Err(format!("child {} must be generator {}", i + 2, i + 1));
            }
        }
        let mut covered = vec![false; 1usize << a.len()];
        for (key, value) in &self.node.params {
            if key.name != "sub" {
                continue;
            }
            let [j] = key.index.as_slice() else {
                return Err(format!("{key} must be sub[j]"));
            };
            let ParamValue::List(list) = value else {
                return Err(format!("{key} must be a list"));
            };
            let idx = index_list(&list.iter().map(i64::to_string).collect::<Vec<_>>().join(" "), a.len())?;
            let mask = idx.iter().fold(0usize, |m, &i| m | 1 << i);
            if let Some(split) = self.node.witness(&Key::indexed("split", &[*j])) {
                let (l, r) = split.split_once('|').ok_or_else(|| format!("split[{j}] malformed"))?;
                let (l, r) = (index_list(l, a.len())?, index_list(r, a.len())?);
                let lm = l.iter().fold(0usize, |m, &i| m | 1 << i);
                let rm = r.iter().fold(0usize, |m, &i| m | 1 << i);
                if l.is_empty() || r.is_empty() || lm & rm != 0 || lm | rm != mask {
                    return Err(format!("split[{j}] is not a partition of sub[{j}]"));
                }
                let parts = vec![
                    l.iter().map(|&i| a[i].clone()).collect(),
                    r.iter().map(|&i| a[i].clone()).collect(),
                ];
                cross_commute(&parts, &format!("split[{j}] parts"))?;
            } else {
                let gamma = self.witness_element(&Key::indexed("gamma", &[*j]))?;
                let g_inv = gamma.inverse();
                let in_conj_m = |e: &Element| {
                    e.mul(&g_inv)
                        .ok()
                        .and_then(|x| gamma.mul(&x).ok())
                        .is_some_and(|x| x.as_aut().is_some_and(in_column_product))
                };
                let conj_m = conjugate_set(&m, &gamma)?;
                let s: Vec<Element> = idx.iter().map(|&i| a[i].clone()).collect();
                if normalizes(&s, &conj_m, &Membership::Decide(&in_conj_m))
                    .map_err(|e| e.to_string())?
                    .is_some()
                {
                    return Err(format!("sub[{j}] does not normalize the conjugate of M by gamma[{j}]"));
                }
                let escapes = (0..a.len()).any(|i| mask >> i & 1 == 0 && in_conj_m(&a[i]));
                if !escapes {
                    return Err(format!("conjugate of M by gamma[{j}] meets the generators only inside sub[{j}]"));
                }
            }
            covered[mask] = true;
        }
        let top = (d as usize).min(a.len());
        if let Some(m) = (1..1usize << a.len()).find(|&m| (m.count_ones() as usize) <= top && !covered[m]) {
            return Err(format!("subset {} has no witness", mask_text(m, a.len())));
        }
        self.ok(self.children_dim().min(Dim::AtMost(d - 1)), Vec::new())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certify::parse;

    #[test]
    fn lexicographic_subsets() {
        assert_eq!(k_subsets(4, 2), vec![vec![0, 1], vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3], vec![2, 3]]);
        assert_eq!(k_subsets(3, 3), vec![vec![0, 1, 2]]);
        assert_eq!(k_subsets(3, 0), vec![Vec::<usize>::new()]);
        assert!(k_subsets(2, 3).is_empty());
        for n in 0..8 {
            for k in 0..=n {
                let c = k_subsets(n, k);
                let binom = (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1));
                assert_eq!(c.len(), binom);
            }
        }
    }

    fn verify(src: &str) -> Verdict {
        check(&parse(src).unwrap())
    }

    #[test]
    fn commuting_finite_groups() {
        let v = verify(
            r##"certificate "c"; ambient gl 3;
gen A = diag [1] dim 3;
gen B = diag [2] dim 3;
node COMMUTE { subject = {"A", "B"};
  child FINITE { subject = {"A"}; param cap = 4; }
  child FINITE { subject = {"B"}; param cap = 4; } }"##,
        );
        assert!(v.verified, "{:?}", v.first_failure);
        assert_eq!(v.dim, None);
        assert_eq!(v.conclusion(), "fixed point in every dimension");
    }

    #[test]
    fn wrong_claimed_dim_is_rejected() {
        let v = verify(
            r##"certificate "c"; ambient gl 3;
gen A = diag [1] dim 3;
node FINITE { subject = {"A"}; dim = 2; param cap = 4; }"##,
        );
        assert!(!v.verified);
        assert!(v.first_failure.unwrap().message.contains("claimed dim"));
    }

    #[test]
    fn bootstrap_on_reflection_pairs() {
        // two commuting copies of a dihedral group of order 8, swapped by Q
        let v = verify(
            r##"certificate "b"; ambient gl 4;
gen A = diag [1] dim 4;
gen P = permmat [2, 1, 3, 4];
gen C = diag [3] dim 4;
gen R = permmat [1, 2, 4, 3];
gen Q = permmat [3, 4, 1, 2];
node BOOTSTRAP { subject = {"A", "P"}; dim = 1;
  param k = [1, 1];
  set S[1] = {"A", "P"};
  set S[2] = {"C", "R"};
  witness conj[2] = "Q";
  child FINITE { subject = {"A"}; param cap = 8; }
  child FINITE { subject = {"P"}; param cap = 8; }
  child FINITE { subject = {"C"}; param cap = 8; }
  child FINITE { subject = {"R"}; param cap = 8; } }"##,
        );
        assert!(v.verified, "{:?}", v.first_failure);
        assert_eq!(v.dim, Some(1));
    }

    #[test]
    fn failing_child_is_reported_below_its_parent() {
        let v = verify(
            r##"certificate "c"; ambient gl 3;
gen A = diag [1] dim 3;
gen E = elementary 1 2 dim 3;
node COMMUTE { subject = {"A", "E"};
  child FINITE { subject = {"A"}; param cap = 4; }
  child FINITE { subject = {"E"}; param cap = 50; } }"##,
        );
        assert!(!v.verified);
        let f = v.first_failure.unwrap();
        assert_eq!(f.path, "root.2");
        assert!(f.message.contains("cap"));
        assert!(v.nodes[0].message.starts_with(CHILD_REJECTED));
    }

    #[test]
    fn flags_only_weaken_towards_the_root() {
        let src = r##"certificate "f"; ambient aut 4;
gen L = nielsen lambda 4 1 rank 4;
node CONJUGATE { subject = {"L"}; FLAGS
  witness conj = "";
  child ASSUME { subject = {"L"}; flags = {nielsen-elliptic}; param flag = "nielsen-elliptic"; } }"##;
        let bad = verify(&src.replace("FLAGS", ""));
        assert!(!bad.verified);
        assert!(bad.first_failure.unwrap().message.contains("flag"));
        let good = verify(&src.replace("FLAGS", "flags = {nielsen-elliptic};"));
        assert!(good.verified, "{:?}", good.first_failure);
        assert!(good.conclusion().contains("conditional on: nielsen-elliptic"));
    }

    #[test]
    fn norm_with_rewrite_witnesses() {
        // ⟨t⟩ normalizes ⟨E_12⟩ where t = diag(-1, 1, 1): t E t = E^-1
        let src = r##"certificate "n"; ambient gl 3;
gen E = elementary 1 2 dim 3;
gen T = diag [1, 3] dim 3;
node NORM { subject = {"E", "T"}; param membership = "witness";
  witness rewrite[1.1.1] = "#1^-1";
  witness rewrite[1.1.2] = "WORD";
  child ASSUME { subject = {"E"}; flags = {semisimple}; param flag = "semisimple"; }
  child FINITE { subject = {"T"}; param cap = 2; } }"##;
        let good = verify(&src.replace("WORD", "#1^-1").replace("node NORM {", "node NORM { flags = {semisimple};"));
        assert!(good.verified, "{:?}", good.first_failure);
        let bad = verify(&src.replace("WORD", "#1").replace("node NORM {", "node NORM { flags = {semisimple};"));
        assert!(!bad.verified);
    }
}
