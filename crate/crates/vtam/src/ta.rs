//! Plain bottom-up tree automata over a memory signature.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::format::{parse_decl_block, parse_name_block};
use crate::lex::{Cursor, Tok};
use crate::term::{Signature, SymbolDecl, Term, BOT};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TaRule {
    pub symbol: usize,
    pub kids: Vec<usize>,
    pub target: usize,
}

/// A tree automaton. `gamma` always contains `bot`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ta {
    pub name: String,
    pub gamma: Signature,
    pub states: Vec<String>,
    pub finals: BTreeSet<usize>,
    pub rules: Vec<TaRule>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProductMode {
    Intersect,
    Union,
}

impl Ta {
    pub fn new(name: impl Into<String>, gamma: &Signature) -> Ta {
        Ta {
            name: name.into(),
            gamma: gamma.with_bot(),
            states: Vec::new(),
            finals: BTreeSet::new(),
            rules: Vec::new(),
        }
    }

    pub fn add_state(&mut self, name: impl Into<String>) -> usize {
        self.states.push(name.into());
        self.states.len() - 1
    }

    pub fn add_rule(&mut self, symbol: usize, kids: Vec<usize>, target: usize) {
        let r = TaRule {
            symbol,
            kids,
            target,
        };
        if !self.rules.contains(&r) {
            self.rules.push(r);
        }
    }

    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.states.iter().position(|s| s == name)
    }

    /// Accepts every term over `gamma` (plus `bot`).
    pub fn universal(gamma: &Signature) -> Ta {
        let mut b = Ta::new("all", gamma);
        let s = b.add_state("s");
        b.finals.insert(s);
        for (i, d) in b.gamma.clone().decls().iter().enumerate() {
            b.add_rule(i, vec![s; d.arity], s);
        }
        b
    }

    pub fn validate(&self) -> Result<()> {
        let mut diags = Vec::new();
        if !self.gamma.contains(BOT) {
            diags.push(format!("memory signature lacks `{BOT}`"));
        }
        for &q in &self.finals {
            if q >= self.states.len() {
                diags.push(format!("final state index {q} out of range"));
            }
        }
        for r in &self.rules {
            if r.symbol >= self.gamma.len() {
                diags.push(format!("rule uses unknown symbol index {}", r.symbol));
            } else if self.gamma.decls()[r.symbol].arity != r.kids.len() {
                diags.push(format!(
                    "rule for `{}` has {} children",
                    self.gamma.name(r.symbol),
                    r.kids.len()
                ));
            }
            if r.target >= self.states.len() || r.kids.iter().any(|&k| k >= self.states.len()) {
                diags.push(format!(
                    "rule for symbol {} uses an undeclared state",
                    r.symbol
                ));
            }
        }
        if diags.is_empty() {
            Ok(())
        } else {
            Err(Error::Invalid(diags))
        }
    }

    /// States reached by `m`; empty if `m` uses a symbol outside `gamma`.
    pub fn run_states(&self, m: &Term) -> BTreeSet<usize> {
        let mut memo = HashMap::new();
        self.run_memo(m, &mut memo)
    }

    fn run_memo(&self, m: &Term, memo: &mut HashMap<Term, BTreeSet<usize>>) -> BTreeSet<usize> {
        if let Some(s) = memo.get(m) {
            return s.clone();
        }
        let Some(sym) = self.gamma.index_of(m.sym()) else {
            return BTreeSet::new();
        };
        if self.gamma.decls()[sym].arity != m.arity() {
            return BTreeSet::new();
        }
        let kids: Vec<BTreeSet<usize>> = m.kids().iter().map(|k| self.run_memo(k, memo)).collect();
        let out: BTreeSet<usize> = self
            .rules
            .iter()
            .filter(|r| r.symbol == sym && r.kids.iter().zip(&kids).all(|(q, ks)| ks.contains(q)))
            .map(|r| r.target)
            .collect();
        memo.insert(m.clone(), out.clone());
        out
    }

    pub fn accepts(&self, m: &Term) -> bool {
        self.run_states(m).iter().any(|q| self.finals.contains(q))
    }

    /// One minimal-size term per reachable state, ties by print order.
    pub fn state_witnesses(&self) -> Vec<Option<Term>> {
        let mut best: Vec<Option<(Term, String)>> = vec![None; self.states.len()];
        loop {
            let mut changed = false;
            for r in &self.rules {
                let mut kids = Vec::with_capacity(r.kids.len());
                for &k in &r.kids {
                    match &best[k] {
                        Some((t, _)) => kids.push(t.clone()),
                        None => break,
                    }
                }
                if kids.len() != r.kids.len() {
                    continue;
                }
                let cand = Term::app(self.gamma.name(r.symbol), kids);
                let better = match &best[r.target] {
                    None => true,
                    Some((t, s)) => {
                        cand.size() < t.size() || (cand.size() == t.size() && cand.to_string() < *s)
                    }
                };
                if better {
                    let s = cand.to_string();
                    best[r.target] = Some((cand, s));
                    changed = true;
                }
            }
            if !changed {
                return best.into_iter().map(|b| b.map(|(t, _)| t)).collect();
            }
        }
    }

    pub fn reachable_states(&self) -> BTreeSet<usize> {
        let mut reach = vec![false; self.states.len()];
        loop {
            let mut changed = false;
            for r in &self.rules {
                if !reach[r.target] && r.kids.iter().all(|&k| reach[k]) {
                    reach[r.target] = true;
                    changed = true;
                }
            }
            if !changed {
                return (0..self.states.len()).filter(|&q| reach[q]).collect();
            }
        }
    }

    pub fn is_empty(&self) -> bool {
        self.reachable_states().is_disjoint(&self.finals)
    }

    /// Minimal-size accepted term.
    pub fn witness(&self) -> Result<Term> {
        let ws = self.state_witnesses();
        self.finals
            .iter()
            .filter_map(|&q| ws[q].clone())
            .min_by(|a, b| a.cmp_size_lex(b))
            .ok_or_else(|| {
                Error::Unsupported("witness requested on an empty tree automaton".into())
            })
    }

    fn same_gamma(&self, other: &Ta) -> Result<()> {
        let a: BTreeSet<&SymbolDecl> = self.gamma.decls().iter().collect();
        let b: BTreeSet<&SymbolDecl> = other.gamma.decls().iter().collect();
        if a != b {
            return Err(Error::Incompatible(format!(
                "memory signatures differ: {} vs {}",
                self.gamma, other.gamma
            )));
        }
        Ok(())
    }

    /// Adds a sink state if some symbol/children combination has no rule.
    pub fn completed(&self) -> Ta {
        let n = self.states.len();
        let have: HashSet<(usize, &[usize])> = self
            .rules
            .iter()
            .map(|r| (r.symbol, r.kids.as_slice()))
            .collect();
        let combos = |bound: usize| -> Vec<(usize, Vec<usize>)> {
            let mut v = Vec::new();
            for (i, d) in self.gamma.decls().iter().enumerate() {
                if d.arity == 0 {
                    v.push((i, vec![]));
                } else {
                    for x in 0..bound {
                        for y in 0..bound {
                            v.push((i, vec![x, y]));
                        }
                    }
                }
            }
            v
        };
        if combos(n)
            .iter()
            .all(|(i, k)| have.contains(&(*i, k.as_slice())))
        {
            return self.clone();
        }
        let mut b = self.clone();
        let sink = b.add_state(fresh(&self.states, "s_sink"));
        for (i, k) in combos(n + 1) {
            if !have.contains(&(i, k.as_slice())) {
                b.add_rule(i, k, sink);
            }
        }
        b
    }

    /// Reachable part of the product automaton.
    pub fn product(&self, other: &Ta, mode: ProductMode) -> Result<Ta> {
        self.same_gamma(other)?;
        let (l, r) = match mode {
            ProductMode::Intersect => (self.clone(), other.clone()),
            ProductMode::Union => (self.completed(), other.completed()),
        };
        let mut out = Ta::new(format!("{}_{}", l.name, r.name), &self.gamma);
        let mut ids: HashMap<(usize, usize), usize> = HashMap::new();
        let mut names = HashSet::new();
        let by_sym = |t: &Ta| {
            let mut m: BTreeMap<usize, Vec<TaRule>> = BTreeMap::new();
            for r in &t.rules {
                m.entry(r.symbol).or_default().push(r.clone());
            }
            m
        };
        let (lr, rr) = (by_sym(&l), by_sym(&r));
        loop {
            let mut changed = false;
            for (i, d) in self.gamma.decls().iter().enumerate() {
                let other_i = r.gamma.index_of(&d.name).expect("same gamma");
                let (Some(ls), Some(rs)) = (
                    lr.get(&l.gamma.index_of(&d.name).unwrap()),
                    rr.get(&other_i),
                ) else {
                    continue;
                };
                for a in ls {
                    for b in rs {
                        let kids: Option<Vec<usize>> = a
                            .kids
                            .iter()
                            .zip(&b.kids)
                            .map(|(&x, &y)| ids.get(&(x, y)).copied())
                            .collect();
                        let Some(kids) = kids else { continue };
                        let key = (a.target, b.target);
                        let t = match ids.get(&key) {
                            Some(&t) => t,
                            None => {
                                let base = format!("{}__{}", l.states[key.0], r.states[key.1]);
                                let name = unique(&mut names, base);
                                let t = out.add_state(name);
                                ids.insert(key, t);
                                changed = true;
                                t
                            }
                        };
                        let before = out.rules.len();
                        out.add_rule(i, kids, t);
                        changed |= out.rules.len() != before;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        for (&(x, y), &t) in &ids {
            let (fx, fy) = (l.finals.contains(&x), r.finals.contains(&y));
            let fin = match mode {
                ProductMode::Intersect => fx && fy,
                ProductMode::Union => fx || fy,
            };
            if fin {
                out.finals.insert(t);
            }
        }
        Ok(out)
    }

    /// Complete deterministic automaton over reachable state sets.
    pub fn determinize(&self) -> Ta {
        let mut out = Ta::new(format!("{}_det", self.name), &self.gamma);
        let mut sets: Vec<BTreeSet<usize>> = Vec::new();
        let mut ids: HashMap<BTreeSet<usize>, usize> = HashMap::new();
        let mut intern =
            |s: BTreeSet<usize>, out: &mut Ta, sets: &mut Vec<BTreeSet<usize>>| -> (usize, bool) {
                if let Some(&i) = ids.get(&s) {
                    return (i, false);
                }
                let name = if s.is_empty() {
                    "se".to_string()
                } else {
                    format!(
                        "s{}",
                        s.iter()
                            .map(|q| q.to_string())
                            .collect::<Vec<_>>()
                            .join("x")
                    )
                };
                let i = out.add_state(name);
                ids.insert(s.clone(), i);
                sets.push(s);
                (i, true)
            };
        let gamma = self.gamma.clone();
        let mut seen_rules: HashSet<(usize, Vec<usize>)> = HashSet::new();
        loop {
            let mut changed = false;
            for (i, d) in gamma.decls().iter().enumerate() {
                let combos: Vec<Vec<usize>> = if d.arity == 0 {
                    vec![vec![]]
                } else {
                    let n = sets.len();
                    (0..n)
                        .flat_map(|x| (0..n).map(move |y| vec![x, y]))
                        .collect()
                };
                for kids in combos {
                    if seen_rules.contains(&(i, kids.clone())) {
                        continue;
                    }
                    let target: BTreeSet<usize> = self
                        .rules
                        .iter()
                        .filter(|r| {
                            r.symbol == i
                                && r.kids.iter().zip(&kids).all(|(q, &k)| sets[k].contains(q))
                        })
                        .map(|r| r.target)
                        .collect();
                    let (t, _) = intern(target, &mut out, &mut sets);
                    seen_rules.insert((i, kids.clone()));
                    out.add_rule(i, kids, t);
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        for (k, s) in sets.iter().enumerate() {
            if !s.is_disjoint(&self.finals) {
                out.finals.insert(k);
            }
        }
        out
    }

    pub fn complement(&self) -> Ta {
        let mut d = self.determinize();
        d.name = format!("{}_not", self.name);
        d.finals = (0..d.states.len())
            .filter(|q| !d.finals.contains(q))
            .collect();
        d
    }

    /// Accepts exactly the terms over `gamma` that are not in `ms`.
    pub fn complement_of_finite_set(ms: &BTreeSet<Term>, gamma: &Signature) -> Result<Ta> {
        let gamma = gamma.with_bot();
        for m in ms {
            m.check(&gamma)?;
        }
        let mut subs: BTreeSet<Term> = BTreeSet::new();
        for m in ms {
            subs.extend(m.subterms());
        }
        let subs: Vec<Term> = subs.into_iter().collect();
        let mut out = Ta::new("cofinite", &gamma);
        let mut names = HashSet::new();
        let mut ids: HashMap<Term, usize> = HashMap::new();
        for (k, t) in subs.iter().enumerate() {
            let q = out.add_state(unique(&mut names, format!("e{k}")));
            ids.insert(t.clone(), q);
        }
        let other = out.add_state(unique(&mut names, "other".into()));
        for (i, d) in gamma.decls().iter().enumerate() {
            if d.arity == 0 {
                let t = Term::leaf(d.name.as_str());
                out.add_rule(i, vec![], ids.get(&t).copied().unwrap_or(other));
            } else {
                for x in 0..=subs.len() {
                    for y in 0..=subs.len() {
                        let target = if x < subs.len() && y < subs.len() {
                            let t = Term::bin(d.name.as_str(), subs[x].clone(), subs[y].clone());
                            ids.get(&t).copied().unwrap_or(other)
                        } else {
                            other
                        };
                        let (qx, qy) = (
                            if x < subs.len() { ids[&subs[x]] } else { other },
                            if y < subs.len() { ids[&subs[y]] } else { other },
                        );
                        out.add_rule(i, vec![qx, qy], target);
                    }
                }
            }
        }
        for q in 0..out.states.len() {
            let excluded = subs
                .iter()
                .position(|t| ids[t] == q)
                .is_some_and(|k| ms.contains(&subs[k]));
            if !excluded {
                out.finals.insert(q);
            }
        }
        Ok(out)
    }

    /// Drops states that no term reaches.
    pub fn trimmed(&self) -> Ta {
        let reach = self.reachable_states();
        let mut map = vec![None; self.states.len()];
        let mut out = Ta::new(self.name.clone(), &self.gamma);
        for &q in &reach {
            map[q] = Some(out.add_state(self.states[q].clone()));
        }
        for r in &self.rules {
            if let Some(t) = map[r.target] {
                let kids: Option<Vec<usize>> = r.kids.iter().map(|&k| map[k]).collect();
                if let Some(kids) = kids {
                    out.add_rule(r.symbol, kids, t);
                }
            }
        }
        out.finals = self.finals.iter().filter_map(|&q| map[q]).collect();
        out
    }
}

fn fresh(taken: &[String], base: &str) -> String {
    if !taken.iter().any(|s| s == base) {
        return base.to_string();
    }
    (1..)
        .map(|i| format!("{base}_{i}"))
        .find(|n| !taken.iter().any(|s| s == n))
        .unwrap()
}

fn unique(names: &mut HashSet<String>, base: String) -> String {
    let mut name = base.clone();
    let mut i = 1;
    while names.contains(&name) {
        name = format!("{base}_{i}");
        i += 1;
    }
    names.insert(name.clone());
    name
}

/// Reads the `ta` file format (`bot` implicit in gamma).
pub fn parse_ta(src: &str) -> Result<Ta> {
    let mut cur = Cursor::new(src)?;
    cur.expect_keyword("ta")?;
    let mut name = "ta".to_string();
    if let Some(Tok::Ident(s)) = cur.peek() {
        if !matches!(s.as_str(), "gamma" | "states" | "final" | "rules") {
            name = cur.expect_ident()?;
        }
    }
    let (mut gamma, mut states, mut finals, mut rules) = (None, None, None, None);
    while !cur.at_end() {
        let kw = cur.expect_ident()?;
        match kw.as_str() {
            "gamma" if gamma.is_none() => gamma = Some(parse_decl_block(&mut cur)?),
            "states" if states.is_none() => states = Some(parse_name_block(&mut cur)?),
            "final" if finals.is_none() => finals = Some(parse_name_block(&mut cur)?),
            "rules" if rules.is_none() => rules = Some(parse_ta_rules(&mut cur)?),
            other => return Err(cur.error(format!("unexpected or repeated section `{other}`"))),
        }
    }
    let gamma = Signature::new(gamma.unwrap_or_default())?;
    let mut b = Ta::new(name, &gamma);
    let mut diags = Vec::new();
    for s in states.unwrap_or_default() {
        if b.state_index(&s).is_some() {
            diags.push(format!("duplicate state `{s}`"));
        } else {
            b.add_state(s);
        }
    }
    for s in finals.unwrap_or_default() {
        match b.state_index(&s) {
            Some(q) => {
                b.finals.insert(q);
            }
            None => diags.push(format!("final state `{s}` is not declared")),
        }
    }
    for (line, sym, kids, target) in rules.unwrap_or_default() {
        let Some(i) = b.gamma.index_of(&sym) else {
            diags.push(format!(
                "rule at line {line}: unknown memory symbol `{sym}`"
            ));
            continue;
        };
        if b.gamma.decls()[i].arity != kids.len() {
            diags.push(format!(
                "rule at line {line}: `{sym}` has arity {}",
                b.gamma.decls()[i].arity
            ));
            continue;
        }
        let ks: Option<Vec<usize>> = kids.iter().map(|k| b.state_index(k)).collect();
        match (ks, b.state_index(&target)) {
            (Some(ks), Some(t)) => b.add_rule(i, ks, t),
            _ => diags.push(format!("rule at line {line}: undeclared state")),
        }
    }
    if diags.is_empty() {
        Ok(b)
    } else {
        Err(Error::Invalid(diags))
    }
}

type RawTaRule = (usize, String, Vec<String>, String);

fn parse_ta_rules(cur: &mut Cursor) -> Result<Vec<RawTaRule>> {
    cur.expect_punct('{')?;
    let mut out = Vec::new();
    loop {
        if cur.eat_punct('}') {
            return Ok(out);
        }
        let line = cur.here().0;
        let sym = cur.expect_ident()?;
        let mut kids = Vec::new();
        if cur.eat_punct('(') {
            loop {
                kids.push(cur.expect_ident()?);
                if !cur.eat_punct(',') {
                    break;
                }
            }
            cur.expect_punct(')')?;
        }
        if cur.next() != Some(Tok::Arrow) {
            return Err(cur.error("expected `->`"));
        }
        let target = cur.expect_ident()?;
        cur.expect_punct(';')?;
        out.push((line, sym, kids, target));
    }
}

pub fn print_ta(b: &Ta) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "ta {}", b.name);
    let _ = writeln!(s, "gamma {{ {} }}", b.gamma.without_bot());
    let _ = writeln!(s, "states {{ {} }}", b.states.join(" "));
    let fin: Vec<&str> = b.finals.iter().map(|&q| b.states[q].as_str()).collect();
    let _ = writeln!(s, "final {{ {} }}", fin.join(" "));
    s.push_str("rules {\n");
    for r in &b.rules {
        let sym = b.gamma.name(r.symbol);
        if r.kids.is_empty() {
            let _ = writeln!(s, "  {sym} -> {} ;", b.states[r.target]);
        } else {
            let ks: Vec<&str> = r.kids.iter().map(|&k| b.states[k].as_str()).collect();
            let _ = writeln!(s, "  {sym}({}) -> {} ;", ks.join(","), b.states[r.target]);
        }
    }
    s.push_str("}\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::parse_term_free;

    fn t(s: &str) -> Term {
        parse_term_free(s).unwrap()
    }

    fn hcc() -> Ta {
        parse_ta(
            "ta one gamma { h/2 c/0 } states { s r } final { r } rules { c -> s ; h(s,s) -> r ; }",
        )
        .unwrap()
    }

    #[test]
    fn accepts_and_witness() {
        let b =
            parse_ta("ta x gamma { h/2 c/0 } states { s } final { s } rules { c -> s ; }").unwrap();
        assert!(b.accepts(&t("c")));
        assert!(!b.accepts(&t("h(c,c)")));
        assert_eq!(b.witness().unwrap(), t("c"));
        let h = hcc();
        assert_eq!(h.witness().unwrap(), t("h(c,c)"));
        assert_eq!(h.witness().unwrap().size(), 3);
        let mut e = h.clone();
        e.finals.clear();
        assert!(e.is_empty());
        assert!(e.witness().is_err());
    }

    #[test]
    fn witness_tie_break_is_print_order() {
        let b = parse_ta(
            "ta x gamma { h/2 c/0 } states { s } final { s } rules { c -> s ; bot -> s ; }",
        )
        .unwrap();
        assert_eq!(b.witness().unwrap(), t("bot"));
    }

    #[test]
    fn boolean_identities() {
        let b = hcc();
        let nb = b.complement();
        assert!(b.product(&nb, ProductMode::Intersect).unwrap().is_empty());
        let u = b.product(&nb, ProductMode::Union).unwrap();
        for m in ["c", "bot", "h(c,c)", "h(bot,c)", "h(h(c,c),c)"] {
            assert!(u.accepts(&t(m)), "{m}");
            assert_eq!(nb.accepts(&t(m)), !b.accepts(&t(m)));
        }
    }

    #[test]
    fn cofinite() {
        let g = Signature::from_spec("h/2 c/0").unwrap();
        let ms: BTreeSet<Term> = [t("c")].into_iter().collect();
        let b = Ta::complement_of_finite_set(&ms, &g).unwrap();
        assert!(!b.accepts(&t("c")));
        assert!(b.accepts(&t("h(c,c)")));
        assert!(b.accepts(&t("bot")));
    }

    #[test]
    fn file_round_trip() {
        let b = hcc();
        assert_eq!(parse_ta(&print_ta(&b)).unwrap(), b);
        assert!(matches!(
            parse_ta("ta gamma { c/0 } states { s } rules { c -> r ; }"),
            Err(Error::Invalid(_))
        ));
    }
}
