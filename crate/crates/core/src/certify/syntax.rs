use std::fmt::Write as _;

use super::{
    Ambient, AmbientKind, Certificate, CertifyError, Dim, GenDecl, GenDef, Key, Node, ParamValue,
};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Int(i64),
    Str(String),
    Sym(char),
}

struct Lexer {
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

fn err(line: usize, message: impl Into<String>) -> CertifyError {
    CertifyError::Syntax {
        line,
        message: message.into(),
    }
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>, CertifyError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let mut line = 1;
    while i < chars.len() {
        let c = chars[i];
        if c == '\n' {
            line += 1;
            i += 1;
        } else if c.is_whitespace() {
            i += 1;
        } else if c == '/' && chars.get(i + 1) == Some(&'/') {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_' || chars[i] == '-') {
                i += 1;
            }
            out.push((Tok::Ident(chars[start..i].iter().collect()), line));
        } else if c.is_ascii_digit() || (c == '-' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit())) {
            let start = i;
            i += 1;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let text: String = chars[start..i].iter().collect();
            let v = text.parse().map_err(|_| err(line, format!("bad integer {text}")))?;
            out.push((Tok::Int(v), line));
        } else if c == '"' {
            let mut s = String::new();
            i += 1;
            loop {
                match chars.get(i) {
                    None => return Err(err(line, "unterminated string")),
                    Some('"') => {
                        i += 1;
                        break;
                    }
                    Some('\\') => {
                        match chars.get(i + 1) {
                            Some(&e @ ('"' | '\\')) => s.push(e),
                            _ => return Err(err(line, "bad escape in string")),
                        }
                        i += 2;
                    }
                    Some('\n') => return Err(err(line, "newline in string")),
                    Some(&ch) => {
                        s.push(ch);
                        i += 1;
                    }
                }
            }
            out.push((Tok::Str(s), line));
        } else if "{}[]=;,.".contains(c) {
            out.push((Tok::Sym(c), line));
            i += 1;
        } else {
            return Err(err(line, format!("unexpected character {c:?}")));
        }
    }
    Ok(out)
}

impl Lexer {
    fn line(&self) -> usize {
        self.toks
            .get(self.pos)
            .or(self.toks.last())
            .map_or(1, |t| t.1)
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.0)
    }

    fn next(&mut self) -> Result<Tok, CertifyError> {
        let t = self
            .toks
            .get(self.pos)
            .map(|t| t.0.clone())
            .ok_or_else(|| err(self.line(), "unexpected end of input"))?;
        self.pos += 1;
        Ok(t)
    }

    fn sym(&mut self, c: char) -> Result<(), CertifyError> {
        match self.next()? {
            Tok::Sym(s) if s == c => Ok(()),
            other => Err(err(self.line(), format!("expected '{c}', found {other:?}"))),
        }
    }

    fn is_sym(&self, c: char) -> bool {
        self.peek() == Some(&Tok::Sym(c))
    }

    fn ident(&mut self) -> Result<String, CertifyError> {
        match self.next()? {
            Tok::Ident(s) => Ok(s),
            other => Err(err(self.line(), format!("expected identifier, found {other:?}"))),
        }
    }

    fn keyword(&mut self, kw: &str) -> Result<(), CertifyError> {
        let got = self.ident()?;
        if got == kw {
            Ok(())
        } else {
            Err(err(self.line(), format!("expected '{kw}', found '{got}'")))
        }
    }

    fn int(&mut self) -> Result<i64, CertifyError> {
        match self.next()? {
            Tok::Int(v) => Ok(v),
            other => Err(err(self.line(), format!("expected integer, found {other:?}"))),
        }
    }

    fn uint(&mut self) -> Result<usize, CertifyError> {
        let v = self.int()?;
        usize::try_from(v).map_err(|_| err(self.line(), format!("expected non-negative integer, found {v}")))
    }

    fn string(&mut self) -> Result<String, CertifyError> {
        match self.next()? {
            Tok::Str(s) => Ok(s),
            other => Err(err(self.line(), format!("expected string, found {other:?}"))),
        }
    }

    fn int_list(&mut self) -> Result<Vec<i64>, CertifyError> {
        self.sym('[')?;
        let mut out = Vec::new();
        while !self.is_sym(']') {
            out.push(self.int()?);
            if !self.is_sym(']') {
                self.sym(',')?;
            }
        }
        self.sym(']')?;
        Ok(out)
    }

    fn uint_list(&mut self) -> Result<Vec<usize>, CertifyError> {
        let line = self.line();
        self.int_list()?
            .into_iter()
            .map(|v| usize::try_from(v).map_err(|_| err(line, "negative index")))
            .collect()
    }

    fn string_set(&mut self) -> Result<Vec<String>, CertifyError> {
        self.sym('{')?;
        let mut out = Vec::new();
        while !self.is_sym('}') {
            out.push(self.string()?);
            if !self.is_sym('}') {
                self.sym(',')?;
            }
        }
        self.sym('}')?;
        Ok(out)
    }

    fn key(&mut self) -> Result<Key, CertifyError> {
        let name = self.ident()?;
        let mut index = Vec::new();
        if self.is_sym('[') {
            self.sym('[')?;
            loop {
                let v = self.int()?;
                index.push(u32::try_from(v).map_err(|_| err(self.line(), "bad index"))?);
                if self.is_sym('.') {
                    self.sym('.')?;
                } else {
                    break;
                }
            }
            self.sym(']')?;
        }
        Ok(Key { name, index })
    }
}

fn parse_gendef(lx: &mut Lexer) -> Result<GenDef, CertifyError> {
    let kind = lx.ident()?;
    Ok(match kind.as_str() {
        "nielsen" => {
            let left = match lx.ident()?.as_str() {
                "lambda" => true,
                "rho" => false,
                other => return Err(err(lx.line(), format!("expected lambda or rho, found {other}"))),
            };
            let i = lx.uint()?;
            let j = lx.uint()?;
            lx.keyword("rank")?;
            GenDef::Nielsen { left, i, j, rank: lx.uint()? }
        }
        "signperm" => {
            let perm = lx.uint_list()?;
            lx.keyword("flip")?;
            GenDef::SignPerm { perm, flip: lx.uint_list()? }
        }
        "braid" => {
            let i = lx.uint()?;
            lx.keyword("strands")?;
            GenDef::Braid { i, strands: lx.uint()? }
        }
        "braid-circle" => {
            lx.keyword("strands")?;
            GenDef::BraidCircle { strands: lx.uint()? }
        }
        "elementary" => {
            let i = lx.uint()?;
            let j = lx.uint()?;
            lx.keyword("dim")?;
            GenDef::Elementary { i, j, dim: lx.uint()? }
        }
        "diag" => {
            let flips = lx.uint_list()?;
            lx.keyword("dim")?;
            GenDef::Diag { flips, dim: lx.uint()? }
        }
        "permmat" => GenDef::PermMatrix { perm: lx.uint_list()? },
        "matrix" => {
            lx.sym('[')?;
            let mut rows = Vec::new();
            while !lx.is_sym(']') {
                rows.push(lx.int_list()?);
                if !lx.is_sym(']') {
                    lx.sym(',')?;
                }
            }
            lx.sym(']')?;
            GenDef::Matrix { rows }
        }
        "word" => GenDef::Word(lx.string()?),
        other => return Err(err(lx.line(), format!("unknown generator kind {other}"))),
    })
}

fn parse_node_body(lx: &mut Lexer, rule: String) -> Result<Node, CertifyError> {
    let mut node = Node::new(&rule, Vec::new());
    lx.sym('{')?;
    while !lx.is_sym('}') {
        let item = lx.ident()?;
        match item.as_str() {
            "subject" => {
                lx.sym('=')?;
                node.subject = lx.string_set()?;
                lx.sym(';')?;
            }
            "dim" => {
                lx.sym('=')?;
                node.dim = match lx.peek() {
                    Some(Tok::Ident(s)) if s == "any" => {
                        lx.next()?;
                        Dim::Any
                    }
                    _ => Dim::AtMost(lx.int()?),
                };
                lx.sym(';')?;
            }
            "flags" => {
                lx.sym('=')?;
                lx.sym('{')?;
                let mut flags = Vec::new();
                while !lx.is_sym('}') {
                    flags.push(lx.ident()?);
                    if !lx.is_sym('}') {
                        lx.sym(',')?;
                    }
                }
                lx.sym('}')?;
                lx.sym(';')?;
                node.flags = flags;
            }
            "param" => {
                let key = lx.key()?;
                lx.sym('=')?;
                let value = match lx.peek() {
                    Some(Tok::Str(_)) => ParamValue::Str(lx.string()?),
                    Some(Tok::Sym('[')) => ParamValue::List(lx.int_list()?),
                    _ => ParamValue::Int(lx.int()?),
                };
                lx.sym(';')?;
                node.params.push((key, value));
            }
            "set" => {
                let key = lx.key()?;
                lx.sym('=')?;
                let set = lx.string_set()?;
                lx.sym(';')?;
                node.sets.push((key, set));
            }
            "witness" => {
                let key = lx.key()?;
                lx.sym('=')?;
                let w = lx.string()?;
                lx.sym(';')?;
                node.witnesses.push((key, w));
            }
            "child" => {
                let rule = lx.ident()?;
                node.children.push(parse_node_body(lx, rule)?);
            }
            other => return Err(err(lx.line(), format!("unknown node item {other}"))),
        }
    }
    lx.sym('}')?;
    Ok(node)
}

/// Parses the certificate text format.
pub fn parse(src: &str) -> Result<Certificate, CertifyError> {
    let mut lx = Lexer { toks: lex(src)?, pos: 0 };
    lx.keyword("certificate")?;
    let name = lx.string()?;
    lx.sym(';')?;
    lx.keyword("ambient")?;
    let kw = lx.ident()?;
    let kind = AmbientKind::from_keyword(&kw).ok_or_else(|| err(lx.line(), format!("unknown ambient {kw}")))?;
    let n = lx.uint()?;
    lx.sym(';')?;
    let mut gens = Vec::new();
    loop {
        match lx.peek() {
            Some(Tok::Ident(s)) if s == "gen" => {
                lx.next()?;
                let name = lx.ident()?;
                lx.sym('=')?;
                let def = parse_gendef(&mut lx)?;
                lx.sym(';')?;
                gens.push(GenDecl { name, def });
            }
            _ => break,
        }
    }
    lx.keyword("node")?;
    let rule = lx.ident()?;
    let root = parse_node_body(&mut lx, rule)?;
    if lx.peek().is_some() {
        return Err(err(lx.line(), "trailing input after root node"));
    }
    Ok(Certificate {
        name,
        ambient: Ambient { kind, n },
        gens,
        root,
    })
}

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        if c == '"' || c == '\\' {
            out.push('\\');
        }
        out.push(c);
    }
    out.push('"');
    out
}

fn list<T: ToString>(xs: &[T]) -> String {
    let parts: Vec<String> = xs.iter().map(ToString::to_string).collect();
    format!("[{}]", parts.join(", "))
}

fn string_set(xs: &[String]) -> String {
    let parts: Vec<String> = xs.iter().map(|s| quote(s)).collect();
    format!("{{{}}}", parts.join(", "))
}

fn gendef_text(def: &GenDef) -> String {
    match def {
        GenDef::Nielsen { left, i, j, rank } => {
            format!("nielsen {} {i} {j} rank {rank}", if *left { "lambda" } else { "rho" })
        }
        GenDef::SignPerm { perm, flip } => format!("signperm {} flip {}", list(perm), list(flip)),
        GenDef::Braid { i, strands } => format!("braid {i} strands {strands}"),
        GenDef::BraidCircle { strands } => format!("braid-circle strands {strands}"),
        GenDef::Elementary { i, j, dim } => format!("elementary {i} {j} dim {dim}"),
        GenDef::Diag { flips, dim } => format!("diag {} dim {dim}", list(flips)),
        GenDef::PermMatrix { perm } => format!("permmat {}", list(perm)),
        GenDef::Matrix { rows } => {
            let rows: Vec<String> = rows.iter().map(|r| list(r)).collect();
            format!("matrix [{}]", rows.join(", "))
        }
        GenDef::Word(w) => format!("word {}", quote(w)),
    }
}

fn print_node(out: &mut String, node: &Node, depth: usize, head: &str) {
    let pad = "  ".repeat(depth);
    let inner = "  ".repeat(depth + 1);
    let _ = writeln!(out, "{pad}{head} {} {{", node.rule);
    let _ = writeln!(out, "{inner}subject = {};", string_set(&node.subject));
    let _ = writeln!(out, "{inner}dim = {};", node.dim);
    if !node.flags.is_empty() {
        let _ = writeln!(out, "{inner}flags = {{{}}};", node.flags.join(", "));
    }
    for (k, v) in &node.params {
        let v = match v {
            ParamValue::Int(i) => i.to_string(),
            ParamValue::Str(s) => quote(s),
            ParamValue::List(l) => list(l),
        };
        let _ = writeln!(out, "{inner}param {k} = {v};");
    }
    for (k, s) in &node.sets {
        let _ = writeln!(out, "{inner}set {k} = {};", string_set(s));
    }
    for (k, w) in &node.witnesses {
        let _ = writeln!(out, "{inner}witness {k} = {};", quote(w));
    }
    for c in &node.children {
        print_node(out, c, depth + 1, "child");
    }
    let _ = writeln!(out, "{pad}}}");
}

/// Canonical text of a certificate.
pub fn print(cert: &Certificate) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "certificate {};", quote(&cert.name));
    let _ = writeln!(out, "ambient {} {};", cert.ambient.kind.keyword(), cert.ambient.n);
    if !cert.gens.is_empty() {
        out.push('\n');
    }
    for g in &cert.gens {
        let _ = writeln!(out, "gen {} = {};", g.name, gendef_text(&g.def));
    }
    out.push('\n');
    print_node(&mut out, &cert.root, 0, "node");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r##"
// two commuting reflections
certificate "sample";
ambient gl 3;
gen A = diag [1] dim 3;
gen B = diag [2] dim 3;
gen M = matrix [[0, 1, 0], [1, 0, 0], [0, 0, -1]];
gen W = word "A B^-1";
node COMMUTE {
  subject = {"A", "B"};
  dim = any;
  child FINITE { subject = {"A"}; dim = any; param cap = 10; }
  child FINITE { subject = {"B"}; param cap = 10; flags = {}; }
}
"##;

    #[test]
    fn parse_and_print_round_trip() {
        let cert = parse(SAMPLE).unwrap();
        assert_eq!(cert.gens.len(), 4);
        assert_eq!(cert.root.children.len(), 2);
        assert_eq!(cert.root.children[1].param(&Key::plain("cap")), Some(&ParamValue::Int(10)));
        let text = print(&cert);
        let again = parse(&text).unwrap();
        assert_eq!(again, cert);
        assert_eq!(print(&again), text);
    }

    #[test]
    fn keys_strings_and_lists() {
        let src = r##"certificate "a \"q\" b"; ambient aut 3;
node X { subject = {}; dim = 4; flags = {nielsen-elliptic, semisimple};
  param k = [1, -2]; param f = "blocks 5"; set A[2.10] = {"#1 #2^-1"}; witness conj[3] = ""; }"##;
        let cert = parse(src).unwrap();
        assert_eq!(cert.name, "a \"q\" b");
        let node = &cert.root;
        assert_eq!(node.dim, Dim::AtMost(4));
        assert_eq!(node.flags, vec!["nielsen-elliptic", "semisimple"]);
        assert_eq!(node.param(&Key::plain("k")), Some(&ParamValue::List(vec![1, -2])));
        assert_eq!(node.set(&Key::indexed("A", &[2, 10])).unwrap()[0], "#1 #2^-1");
        assert_eq!(node.witness(&Key::indexed("conj", &[3])).unwrap(), "");
        assert_eq!(parse(&print(&cert)).unwrap(), cert);
    }

    #[test]
    fn syntax_errors_carry_lines() {
        let bad = "certificate \"x\";\nambient aut 3;\nnode X {\n subject = {\"a\"}\n}";
        match parse(bad) {
            Err(CertifyError::Syntax { line, .. }) => assert_eq!(line, 5),
            other => panic!("unexpected {other:?}"),
        }
        assert!(parse("certificate \"x\"; ambient foo 3; node X {}").is_err());
        assert!(parse("certificate \"x\"; ambient aut 3; node X {} node Y {}").is_err());
    }
}
