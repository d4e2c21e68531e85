//! Ranked signatures, ground terms and positions.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::lex::{is_identifier, Cursor, Tok};

/// Name of the empty-memory constant.
pub const BOT: &str = "bot";

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SymbolDecl {
    pub name: String,
    pub arity: usize,
}

impl SymbolDecl {
    pub fn new(name: impl Into<String>, arity: usize) -> SymbolDecl {
        SymbolDecl {
            name: name.into(),
            arity,
        }
    }
}

/// A finite set of symbols with arities, kept in declaration order.
#[derive(Debug, Clone, Default)]
pub struct Signature {
    decls: Vec<SymbolDecl>,
    index: HashMap<String, usize>,
}

impl PartialEq for Signature {
    fn eq(&self, other: &Signature) -> bool {
        self.decls == other.decls
    }
}

impl Eq for Signature {}

impl Signature {
    /// Signature restricted to arities 0 and 2; `bot` is reserved.
    pub fn new(decls: impl IntoIterator<Item = SymbolDecl>) -> Result<Signature> {
        let mut sig = Signature::default();
        for d in decls {
            if d.name == BOT {
                return Err(Error::Signature(format!(
                    "`{BOT}` is reserved for the empty memory"
                )));
            }
            if d.arity != 0 && d.arity != 2 {
                return Err(Error::Signature(format!(
                    "`{}` has arity {}, only 0 and 2 are allowed",
                    d.name, d.arity
                )));
            }
            sig.push(d)?;
        }
        Ok(sig)
    }

    /// Signature accepting any arity (source alphabets of translations).
    pub fn with_any_arity(decls: impl IntoIterator<Item = SymbolDecl>) -> Result<Signature> {
        let mut sig = Signature::default();
        for d in decls {
            if d.name == BOT {
                return Err(Error::Signature(format!(
                    "`{BOT}` is reserved for the empty memory"
                )));
            }
            sig.push(d)?;
        }
        Ok(sig)
    }

    /// Builds from a declaration list such as `"a/0 f/2"`.
    pub fn from_spec(spec: &str) -> Result<Signature> {
        Signature::new(parse_decl_list(spec)?)
    }

    fn push(&mut self, d: SymbolDecl) -> Result<()> {
        if !is_identifier(&d.name) {
            return Err(Error::Signature(format!(
                "`{}` is not an identifier",
                d.name
            )));
        }
        if self.index.contains_key(&d.name) {
            return Err(Error::Signature(format!("duplicate symbol `{}`", d.name)));
        }
        self.index.insert(d.name.clone(), self.decls.len());
        self.decls.push(d);
        Ok(())
    }

    /// This signature plus the implicit `bot/0` (memory alphabets).
    pub fn with_bot(&self) -> Signature {
        if self.contains(BOT) {
            return self.clone();
        }
        let mut sig = self.clone();
        sig.index.insert(BOT.to_string(), sig.decls.len());
        sig.decls.push(SymbolDecl::new(BOT, 0));
        sig
    }

    /// This signature without `bot`.
    pub fn without_bot(&self) -> Signature {
        let mut sig = Signature::default();
        for d in &self.decls {
            if d.name != BOT {
                sig.index.insert(d.name.clone(), sig.decls.len());
                sig.decls.push(d.clone());
            }
        }
        sig
    }

    pub fn decls(&self) -> &[SymbolDecl] {
        &self.decls
    }

    pub fn len(&self) -> usize {
        self.decls.len()
    }

    pub fn is_empty(&self) -> bool {
        self.decls.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.index.contains_key(name)
    }

    pub fn arity(&self, name: &str) -> Option<usize> {
        self.index_of(name).map(|i| self.decls[i].arity)
    }

    pub fn name(&self, i: usize) -> &str {
        &self.decls[i].name
    }

    pub fn constants(&self) -> impl Iterator<Item = &SymbolDecl> {
        self.decls.iter().filter(|d| d.arity == 0)
    }

    pub fn binaries(&self) -> impl Iterator<Item = &SymbolDecl> {
        self.decls.iter().filter(|d| d.arity == 2)
    }

    /// Adds a symbol, failing on duplicates.
    pub fn add(&mut self, d: SymbolDecl) -> Result<usize> {
        self.push(d)?;
        Ok(self.decls.len() - 1)
    }

    /// A name starting with `base` not yet used here.
    pub fn fresh_name(&self, base: &str) -> String {
        if !self.contains(base) && base != BOT {
            return base.to_string();
        }
        (1..)
            .map(|i| format!("{base}_{i}"))
            .find(|n| !self.contains(n))
            .unwrap()
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .decls
            .iter()
            .map(|d| format!("{}/{}", d.name, d.arity))
            .collect();
        write!(f, "{}", parts.join(" "))
    }
}

pub(crate) fn parse_decl_list(spec: &str) -> Result<Vec<SymbolDecl>> {
    let mut cur = Cursor::new(spec)?;
    let mut out = Vec::new();
    while !cur.at_end() {
        let name = cur.expect_ident()?;
        cur.expect_punct('/')?;
        let arity = cur.expect_num()? as usize;
        out.push(SymbolDecl::new(name, arity));
    }
    Ok(out)
}

#[derive(PartialEq, Eq, Hash)]
struct Node {
    sym: Arc<str>,
    kids: Vec<Term>,
    size: usize,
}

/// A ground term. Cheap to clone; subterms are shared.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Term(Arc<Node>);

impl Term {
    pub fn app(sym: impl Into<Arc<str>>, kids: Vec<Term>) -> Term {
        let size = 1 + kids.iter().map(Term::size).sum::<usize>();
        Term(Arc::new(Node {
            sym: sym.into(),
            kids,
            size,
        }))
    }

    pub fn leaf(sym: impl Into<Arc<str>>) -> Term {
        Term::app(sym, Vec::new())
    }

    pub fn bin(sym: impl Into<Arc<str>>, l: Term, r: Term) -> Term {
        Term::app(sym, vec![l, r])
    }

    pub fn bot() -> Term {
        Term::leaf(BOT)
    }

    pub fn sym(&self) -> &str {
        &self.0.sym
    }

    pub fn sym_arc(&self) -> Arc<str> {
        self.0.sym.clone()
    }

    pub fn kids(&self) -> &[Term] {
        &self.0.kids
    }

    pub fn kid(&self, i: usize) -> &Term {
        &self.0.kids[i]
    }

    pub fn arity(&self) -> usize {
        self.0.kids.len()
    }

    pub fn is_bot(&self) -> bool {
        self.arity() == 0 && self.sym() == BOT
    }

    /// Number of symbol occurrences.
    pub fn size(&self) -> usize {
        self.0.size
    }

    pub fn depth(&self) -> usize {
        1 + self.kids().iter().map(Term::depth).max().unwrap_or(0)
    }

    pub fn subterm_at(&self, p: &Position) -> Result<Term> {
        let mut t = self;
        for &k in &p.0 {
            if k == 0 || k > t.arity() {
                return Err(Error::InvalidPosition(p.to_string()));
            }
            t = t.kid(k - 1);
        }
        Ok(t.clone())
    }

    /// `self[u]_p`.
    pub fn replace_at(&self, p: &Position, u: Term) -> Result<Term> {
        fn go(t: &Term, path: &[usize], u: Term, p: &Position) -> Result<Term> {
            match path.split_first() {
                None => Ok(u),
                Some((&k, rest)) => {
                    if k == 0 || k > t.arity() {
                        return Err(Error::InvalidPosition(p.to_string()));
                    }
                    let mut kids = t.kids().to_vec();
                    kids[k - 1] = go(&kids[k - 1], rest, u, p)?;
                    Ok(Term::app(t.sym_arc(), kids))
                }
            }
        }
        go(self, &p.0, u, p)
    }

    /// All positions in prefix order.
    pub fn positions(&self) -> Vec<Position> {
        let mut out = Vec::new();
        fn go(t: &Term, cur: &mut Vec<usize>, out: &mut Vec<Position>) {
            out.push(Position(cur.clone()));
            for (i, k) in t.kids().iter().enumerate() {
                cur.push(i + 1);
                go(k, cur, out);
                cur.pop();
            }
        }
        go(self, &mut Vec::new(), &mut out);
        out
    }

    /// Distinct subterms, children before parents.
    pub fn subterms(&self) -> Vec<Term> {
        let mut seen = std::collections::HashSet::new();
        let mut out = Vec::new();
        fn go(t: &Term, seen: &mut std::collections::HashSet<Term>, out: &mut Vec<Term>) {
            if seen.contains(t) {
                return;
            }
            for k in t.kids() {
                go(k, seen, out);
            }
            seen.insert(t.clone());
            out.push(t.clone());
        }
        go(self, &mut seen, &mut out);
        out
    }

    /// Checks every node against `sig`.
    pub fn check(&self, sig: &Signature) -> Result<()> {
        match sig.arity(self.sym()) {
            None => Err(Error::UnknownSymbol(self.sym().to_string())),
            Some(a) if a != self.arity() => Err(Error::Arity {
                name: self.sym().to_string(),
                expected: a,
                found: self.arity(),
            }),
            Some(_) => self.kids().iter().try_for_each(|k| k.check(sig)),
        }
    }

    /// Size first, then printed form.
    pub fn cmp_size_lex(&self, other: &Term) -> Ordering {
        self.size()
            .cmp(&other.size())
            .then_with(|| self.to_string().cmp(&other.to_string()))
    }
}

impl PartialOrd for Term {
    fn partial_cmp(&self, other: &Term) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Structural order: symbol name, then children. Stable across runs.
impl Ord for Term {
    fn cmp(&self, other: &Term) -> Ordering {
        if Arc::ptr_eq(&self.0, &other.0) {
            return Ordering::Equal;
        }
        self.sym()
            .cmp(other.sym())
            .then_with(|| self.kids().cmp(other.kids()))
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.sym())?;
        if !self.kids().is_empty() {
            f.write_str("(")?;
            for (i, k) in self.kids().iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{k}")?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// A path of child indices (1-based); empty is the root.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Position(pub Vec<usize>);

impl Position {
    pub fn root() -> Position {
        Position(Vec::new())
    }

    pub fn child(&self, k: usize) -> Position {
        let mut v = self.0.clone();
        v.push(k);
        Position(v)
    }

    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|k| k.to_string()).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

/// Parses `ident | ident "(" term ("," term)* ")"` against `sig`.
pub fn parse_term(text: &str, sig: &Signature) -> Result<Term> {
    let mut cur = Cursor::new(text)?;
    let t = parse_term_at(&mut cur, sig)?;
    if !cur.at_end() {
        return Err(cur.error("trailing input after term"));
    }
    Ok(t)
}

pub(crate) fn parse_term_at(cur: &mut Cursor, sig: &Signature) -> Result<Term> {
    let name = cur.expect_ident()?;
    let mut kids = Vec::new();
    if cur.eat_punct('(') {
        loop {
            kids.push(parse_term_at(cur, sig)?);
            if cur.eat_punct(',') {
                continue;
            }
            cur.expect_punct(')')?;
            break;
        }
    }
    match sig.arity(&name) {
        None => Err(Error::UnknownSymbol(name)),
        Some(a) if a != kids.len() => Err(Error::Arity {
            name,
            expected: a,
            found: kids.len(),
        }),
        Some(_) => Ok(Term::app(name, kids)),
    }
}

/// Parses a term without a signature (any identifier, any arity).
pub fn parse_term_free(text: &str) -> Result<Term> {
    let mut cur = Cursor::new(text)?;
    fn go(cur: &mut Cursor) -> Result<Term> {
        let name = cur.expect_ident()?;
        let mut kids = Vec::new();
        if cur.eat_punct('(') {
            loop {
                kids.push(go(cur)?);
                if !cur.eat_punct(',') {
                    break;
                }
            }
            cur.expect_punct(')')?;
        }
        Ok(Term::app(name, kids))
    }
    let t = go(&mut cur)?;
    match cur.peek() {
        None => Ok(t),
        Some(Tok::Punct(_)) | Some(_) => Err(cur.error("trailing input after term")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn af() -> Signature {
        Signature::from_spec("a/0 b/0 f/2").unwrap()
    }

    #[test]
    fn parse_examples() {
        let sig = Signature::from_spec("a/0 f/2").unwrap();
        assert_eq!(parse_term("a", &sig).unwrap().size(), 1);
        let t = parse_term("f(a,f(a,a))", &sig).unwrap();
        assert_eq!(t.size(), 5);
        assert_eq!(t.to_string(), "f(a,f(a,a))");
        assert!(matches!(parse_term("f(a)", &sig), Err(Error::Arity { .. })));
        assert!(matches!(
            parse_term("g", &sig),
            Err(Error::UnknownSymbol(_))
        ));
        assert!(matches!(
            parse_term("f(a,", &sig),
            Err(Error::Syntax { .. })
        ));
    }

    #[test]
    fn whitespace_is_ignored() {
        let t = parse_term(" f ( a ,\n b ) ", &af()).unwrap();
        assert_eq!(t.to_string(), "f(a,b)");
    }

    #[test]
    fn subterms_and_positions() {
        let t = parse_term("f(a,b)", &af()).unwrap();
        assert_eq!(t.subterm_at(&Position::root()).unwrap(), t);
        assert_eq!(t.subterm_at(&Position(vec![2])).unwrap().to_string(), "b");
        assert!(matches!(
            t.subterm_at(&Position(vec![1, 1])),
            Err(Error::InvalidPosition(_))
        ));
        let u = t.replace_at(&Position(vec![1]), Term::leaf("b")).unwrap();
        assert_eq!(u.to_string(), "f(b,b)");
        assert_eq!(t.positions().len(), 3);
    }

    #[test]
    fn sizes() {
        let sig = af();
        for (s, n) in [("a", 1), ("f(a,a)", 3), ("f(f(a,a),a)", 5)] {
            assert_eq!(parse_term(s, &sig).unwrap().size(), n);
        }
    }

    #[test]
    fn signature_rules() {
        assert!(Signature::from_spec("g/1").is_err());
        assert!(Signature::from_spec("a/0 a/2").is_err());
        assert!(Signature::from_spec("bot/0").is_err());
        assert!(Signature::with_any_arity(vec![SymbolDecl::new("g", 3)]).is_ok());
        assert!(af().with_bot().contains(BOT));
    }

    fn arb_term() -> impl Strategy<Value = Term> {
        let leaf = prop_oneof![Just(Term::leaf("a")), Just(Term::leaf("b"))];
        leaf.prop_recursive(5, 40, 2, |inner| {
            (inner.clone(), inner).prop_map(|(l, r)| Term::bin("f", l, r))
        })
    }

    proptest! {
        #[test]
        fn print_parse_round_trip(t in arb_term()) {
            prop_assert_eq!(parse_term(&t.to_string(), &af()).unwrap(), t);
        }

        #[test]
        fn root_subterm_is_identity(t in arb_term()) {
            prop_assert_eq!(t.subterm_at(&Position::root()).unwrap(), t);
        }

        #[test]
        fn size_is_additive(l in arb_term(), r in arb_term()) {
            prop_assert_eq!(Term::bin("f", l.clone(), r.clone()).size(), 1 + l.size() + r.size());
        }
    }
}
