use std::collections::HashSet;

use super::{Certificate, Key, Node, ParamValue};

/// One place where a single witness can be perturbed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MutationSite {
    /// Child indices from the root (0-based).
    pub path: Vec<usize>,
    pub key: Key,
    /// `true` for a closure cap parameter, `false` for a witness word.
    pub is_param: bool,
}

impl MutationSite {
    pub fn describe(&self) -> String {
        let mut s = "root".to_string();
        for i in &self.path {
            s.push_str(&format!(".{}", i + 1));
        }
        let kind = if self.is_param { "param" } else { "witness" };
        format!("{s} {kind} {}", self.key)
    }
}

/// Every witness and every closure cap in the tree. Identical subtrees are
/// visited once.
pub fn mutation_sites(cert: &Certificate) -> Vec<MutationSite> {
    let mut out = Vec::new();
    let mut seen: HashSet<(&Node, &Key)> = HashSet::new();
    let mut path = Vec::new();
    collect(&cert.root, &mut path, &mut seen, &mut out);
    out
}

fn collect<'a>(
    node: &'a Node,
    path: &mut Vec<usize>,
    seen: &mut HashSet<(&'a Node, &'a Key)>,
    out: &mut Vec<MutationSite>,
) {
    for (key, _) in &node.witnesses {
        if seen.insert((node, key)) {
            out.push(MutationSite {
                path: path.clone(),
                key: key.clone(),
                is_param: false,
            });
        }
    }
    for (key, _) in &node.params {
        if key.name == "cap" && seen.insert((node, key)) {
            out.push(MutationSite {
                path: path.clone(),
                key: key.clone(),
                is_param: true,
            });
        }
    }
    for (i, c) in node.children.iter().enumerate() {
        path.push(i);
        collect(c, path, seen, out);
        path.pop();
    }
}

fn perturb_word(key: &Key, word: &str, fallback: &str) -> String {
    match key.name.as_str() {
        "split" => word.replace('|', " ") + " |",
        "member" | "rewrite" => {
            let mut toks: Vec<&str> = word.split_whitespace().collect();
            if toks.is_empty() {
                return fallback.to_string();
            }
            toks.pop();
            toks.join(" ")
        }
        _ => {
            if word.trim().is_empty() {
                fallback.to_string()
            } else {
                String::new()
            }
        }
    }
}

/// The certificate with the witness at `site` perturbed: conjugators become the
/// identity (or the first generator if they already were), rewriting words lose
/// their last letter, splits put everything on one side and caps drop to 1.
pub fn apply_mutation(cert: &Certificate, site: &MutationSite) -> Option<Certificate> {
    let mut out = cert.clone();
    let fallback = cert.gens.first().map(|g| g.name.clone()).unwrap_or_default();
    let mut node = &mut out.root;
    for &i in &site.path {
        node = node.children.get_mut(i)?;
    }
    if site.is_param {
        let entry = node.params.iter_mut().find(|(k, _)| *k == site.key)?;
        entry.1 = ParamValue::Int(1);
    } else {
        let entry = node.witnesses.iter_mut().find(|(k, _)| *k == site.key)?;
        entry.1 = perturb_word(&site.key, &entry.1, &fallback);
    }
    Some(out)
}
