//! Signature translations, the example languages, the 3-SAT membership
//! reduction and the lifting of plain tree automata into memory languages.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::model::{Action, Category, Guard, PartitionedSignature, Relation, Rule, Vtam};
use crate::ta::Ta;
use crate::term::{Signature, SymbolDecl, Term, BOT};

/// Leaf name standing for the `k`-th hole of a context (1-based).
pub fn hole(k: usize) -> Term {
    Term::leaf(format!("_{k}"))
}

fn hole_index(t: &Term) -> Option<usize> {
    t.sym()
        .strip_prefix('_')
        .and_then(|s| s.parse().ok())
        .filter(|_| t.arity() == 0)
}

/// Replacement of one source symbol by a context over fresh symbols.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContextDef {
    pub source: String,
    pub arity: usize,
    pub context: Term,
    pub categories: Vec<(SymbolDecl, Category)>,
}

impl ContextDef {
    pub fn new(
        source: &str,
        arity: usize,
        context: Term,
        categories: &[(&str, usize, Category)],
    ) -> ContextDef {
        let categories = categories
            .iter()
            .map(|(n, a, c)| (SymbolDecl::new(*n, *a), *c))
            .collect();
        ContextDef {
            source: source.to_string(),
            arity,
            context,
            categories,
        }
    }

    fn check(&self) -> Result<()> {
        let mut holes = Vec::new();
        fn walk(t: &Term, holes: &mut Vec<usize>) {
            if let Some(k) = hole_index(t) {
                holes.push(k);
            }
            for k in t.kids() {
                walk(k, holes);
            }
        }
        walk(&self.context, &mut holes);
        if holes != (1..=self.arity).collect::<Vec<_>>() {
            return Err(Error::Invalid(vec![format!(
                "context for `{}` must use holes _1.._{} once each, left to right",
                self.source, self.arity
            )]));
        }
        Ok(())
    }
}

/// A translated signature: contexts for some source symbols, the others kept.
#[derive(Debug, Clone)]
pub struct Translation {
    pub source: Signature,
    pub target: PartitionedSignature,
    pub defs: Vec<ContextDef>,
    /// Terms over the target signature built from well-assembled contexts.
    pub well_formed: Ta,
}

impl Translation {
    /// `kept` lists source symbols left untouched, with their category.
    pub fn new(
        source: Signature,
        kept: &[(&str, Category)],
        defs: Vec<ContextDef>,
    ) -> Result<Translation> {
        let mut target = PartitionedSignature::default();
        for (name, cat) in kept {
            let arity = source
                .arity(name)
                .ok_or_else(|| Error::UnknownSymbol(name.to_string()))?;
            target.add(SymbolDecl::new(*name, arity), *cat)?;
        }
        for d in &defs {
            d.check()?;
            if source.arity(&d.source) != Some(d.arity) {
                return Err(Error::Signature(format!(
                    "`{}/{}` is not a source symbol",
                    d.source, d.arity
                )));
            }
            for (decl, cat) in &d.categories {
                target.add(decl.clone(), *cat)?;
            }
        }
        for decl in source.decls() {
            let covered = kept.iter().any(|(n, _)| *n == decl.name)
                || defs.iter().any(|d| d.source == decl.name);
            if !covered {
                return Err(Error::Signature(format!(
                    "source symbol `{}` has no translation",
                    decl.name
                )));
            }
        }
        let well_formed = well_formed_ta(&target, kept, &defs);
        Ok(Translation {
            source,
            target,
            defs,
            well_formed,
        })
    }

    pub fn identity(target: PartitionedSignature) -> Translation {
        let kept: Vec<(String, Category)> = target
            .iter()
            .map(|(_, n, _, c)| (n.to_string(), c))
            .collect();
        let k: Vec<(&str, Category)> = kept.iter().map(|(n, c)| (n.as_str(), *c)).collect();
        let well_formed = well_formed_ta(&target, &k, &[]);
        Translation {
            source: target.base().clone(),
            target,
            defs: Vec::new(),
            well_formed,
        }
    }

    pub fn translate_term(&self, t: &Term) -> Result<Term> {
        let kids: Vec<Term> = t
            .kids()
            .iter()
            .map(|k| self.translate_term(k))
            .collect::<Result<_>>()?;
        match self.defs.iter().find(|d| d.source == t.sym()) {
            Some(d) if d.arity == kids.len() => Ok(fill(&d.context, &kids)),
            Some(d) => Err(Error::Arity {
                name: d.source.clone(),
                expected: d.arity,
                found: kids.len(),
            }),
            None if self.target.index_of(t.sym()).is_some() => Ok(Term::app(t.sym_arc(), kids)),
            None => Err(Error::UnknownSymbol(t.sym().to_string())),
        }
    }

    /// The state discipline enforcing that fresh symbols occur only inside
    /// their contexts.
    pub fn language_guard(&self) -> &Ta {
        &self.well_formed
    }
}

fn fill(ctx: &Term, kids: &[Term]) -> Term {
    if let Some(k) = hole_index(ctx) {
        return kids[k - 1].clone();
    }
    Term::app(
        ctx.sym_arc(),
        ctx.kids().iter().map(|c| fill(c, kids)).collect(),
    )
}

fn well_formed_ta(
    target: &PartitionedSignature,
    kept: &[(&str, Category)],
    defs: &[ContextDef],
) -> Ta {
    let mut ta = Ta::new("well_formed", target.base());
    let ok = ta.add_state("ok");
    ta.finals.insert(ok);
    let sym = |ta: &Ta, n: &str| ta.gamma.index_of(n).expect("target symbol");
    for (name, _) in kept {
        let s = sym(&ta, name);
        let ar = target.arity(target.index_of(name).unwrap());
        ta.add_rule(s, vec![ok; ar], ok);
    }
    for d in defs {
        fn go(t: &Term, root: bool, ok: usize, ta: &mut Ta, prefix: &str) -> usize {
            if hole_index(t).is_some() {
                return ok;
            }
            let kids: Vec<usize> = t
                .kids()
                .iter()
                .enumerate()
                .map(|(i, k)| go(k, false, ok, ta, &format!("{prefix}{i}")))
                .collect();
            let target = if root {
                ok
            } else {
                ta.add_state(format!("in_{prefix}"))
            };
            let s = ta.gamma.index_of(t.sym()).expect("target symbol");
            ta.add_rule(s, kids, target);
            target
        }
        go(&d.context, true, ok, &mut ta, &format!("{}_", d.source));
    }
    ta
}

/// TA states lifted into an automaton.
#[derive(Debug, Clone)]
pub struct Lifted {
    /// `p_s` for every TA state `s`: `M(a, p_s) = L(b, s)`.
    pub states: Vec<usize>,
    /// A state whose memory language is `L(b)`.
    pub top: usize,
}

/// Adds fresh PUSH (and, for `bot`, INT0) symbols and one state per TA
/// state so that memory languages reproduce the TA's languages.
pub fn lift_ta_to_memory(a: &mut Vtam, b: &Ta, base: &str) -> Result<Lifted> {
    let gamma_bot = a.gamma.with_bot();
    let states: Vec<usize> = (0..b.states.len())
        .map(|s| a.add_fresh_state(&format!("{base}_{s}")))
        .collect();
    let top = a.add_fresh_state(base);
    for (k, r) in b.rules.iter().enumerate() {
        let name = b.gamma.name(r.symbol);
        let h = gamma_bot
            .index_of(name)
            .ok_or_else(|| Error::UnknownSymbol(name.to_string()))?;
        let arity = r.kids.len();
        let cat = if name == BOT {
            Category::Int0
        } else {
            Category::Push
        };
        let fresh = a.sigma.base().fresh_name(&format!("{base}_f{k}_{name}"));
        let sym = a.sigma.add(SymbolDecl::new(fresh, arity), cat)?;
        let mut targets = vec![states[r.target]];
        if b.finals.contains(&r.target) {
            targets.push(top);
        }
        for t in targets {
            let rule = match arity {
                0 if name == BOT => Rule::constant(sym, Action::EmitBot, t),
                0 => Rule::constant(sym, Action::PushConst(h), t),
                _ => Rule::binary(
                    sym,
                    states[r.kids[0]],
                    states[r.kids[1]],
                    Guard::None,
                    Action::PushWith(h),
                    t,
                ),
            };
            a.add_rule(rule);
        }
    }
    Ok(Lifted { states, top })
}

/// The lifted fragment alone, over the TA's memory signature.
pub fn lift_ta(b: &Ta) -> Result<(Vtam, Lifted)> {
    let mut a = Vtam::new(
        format!("{}_lifted", b.name),
        PartitionedSignature::default(),
        b.gamma.without_bot(),
        Relation::None,
    );
    let l = lift_ta_to_memory(&mut a, b, "p")?;
    Ok((a, l))
}

pub const EXAMPLES: [&str; 3] = ["balanced", "redblack", "powerlist"];

pub fn build_example(name: &str) -> Result<(Vtam, Translation)> {
    let (a, tr) = match name {
        "balanced" => balanced(),
        "redblack" => redblack(),
        "powerlist" => powerlist(),
        _ => {
            return Err(Error::Unsupported(format!(
                "unknown example `{name}`; expected one of {}",
                EXAMPLES.join(", ")
            )))
        }
    }?;
    a.validate()?;
    Ok((a, tr))
}

fn tie_context(g: &str) -> Term {
    Term::bin(
        format!("{g}2"),
        Term::bin(format!("{g}1"), hole(1), hole(2)),
        Term::leaf(format!("{g}0")),
    )
}

fn rules_from(a: &mut Vtam, lines: &[(&str, &[&str], Guard, Action, &str)]) {
    for (sym, left, guard, action, target) in lines {
        let s = a.symbol_index(sym).expect("symbol");
        let t = a.state_index(target).expect("state");
        let r = match left {
            [] => Rule::constant(s, *action, t),
            [l, r] => Rule::binary(
                s,
                a.state_index(l).unwrap(),
                a.state_index(r).unwrap(),
                *guard,
                *action,
                t,
            ),
            _ => unreachable!(),
        };
        a.add_rule(r);
    }
}

fn new_automaton(
    name: &str,
    tr: &Translation,
    gamma: &str,
    states: &[&str],
    finals: &[&str],
) -> Result<Vtam> {
    let mut a = Vtam::new(
        name,
        tr.target.clone(),
        Signature::from_spec(gamma)?,
        Relation::StructEq,
    );
    for s in states {
        a.add_state(*s);
    }
    for f in finals {
        a.finals.insert(a.state_index(f).unwrap());
    }
    Ok(a)
}

/// Perfectly balanced binary trees over `{a/0, g/2}`: every internal node's
/// subtrees have the same height.
fn balanced() -> Result<(Vtam, Translation)> {
    let ctx = ContextDef::new(
        "g",
        2,
        tie_context("g"),
        &[
            ("g2", 2, Category::Push),
            ("g1", 2, Category::Cint1),
            ("g0", 0, Category::Int0),
        ],
    );
    let tr = Translation::new(
        Signature::from_spec("a/0 g/2")?,
        &[("a", Category::Int0)],
        vec![ctx],
    )?;
    let mut a = new_automaton("balanced", &tr, "f/2", &["q", "q0", "qf"], &["qf"])?;
    let f = a.gamma.index_of("f").unwrap();
    rules_from(
        &mut a,
        &[
            ("a", &[], Guard::None, Action::EmitBot, "qf"),
            ("g0", &[], Guard::None, Action::EmitBot, "q0"),
            ("g1", &["qf", "qf"], Guard::RelPos, Action::KeepLeft, "q"),
            ("g2", &["q", "q0"], Guard::None, Action::PushWith(f), "qf"),
        ],
    );
    Ok((a, tr))
}

/// Red-black trees over `{n/0, B/2, R/2}`: `n` is a black nil leaf, the root
/// is black, red nodes have black children, and every path from a node to
/// a leaf crosses the same number of black nodes (nil leaves included).
/// A black node tests its children then pushes; a red node only tests.
fn redblack() -> Result<(Vtam, Translation)> {
    let black = ContextDef::new(
        "B",
        2,
        tie_context("b"),
        &[
            ("b2", 2, Category::Push),
            ("b1", 2, Category::Cint1),
            ("b0", 0, Category::Int0),
        ],
    );
    let red = ContextDef::new(
        "R",
        2,
        Term::bin("r", hole(1), hole(2)),
        &[("r", 2, Category::Cint1)],
    );
    let tr = Translation::new(
        Signature::from_spec("n/0 B/2 R/2")?,
        &[("n", Category::Push)],
        vec![black, red],
    )?;
    let mut a = new_automaton(
        "redblack",
        &tr,
        "f/2 c/0",
        &["qb", "qr", "qi", "q0"],
        &["qb"],
    )?;
    let f = a.gamma.index_of("f").unwrap();
    let c = a.gamma.index_of("c").unwrap();
    let mut lines: Vec<(&str, &[&str], Guard, Action, &str)> = vec![
        ("n", &[], Guard::None, Action::PushConst(c), "qb"),
        ("b0", &[], Guard::None, Action::EmitBot, "q0"),
        ("b2", &["qi", "q0"], Guard::None, Action::PushWith(f), "qb"),
        ("r", &["qb", "qb"], Guard::RelPos, Action::KeepLeft, "qr"),
    ];
    let pairs: [&[&str]; 4] = [&["qb", "qb"], &["qb", "qr"], &["qr", "qb"], &["qr", "qr"]];
    for p in pairs {
        lines.push(("b1", p, Guard::RelPos, Action::KeepLeft, "qi"));
    }
    rules_from(&mut a, &lines);
    Ok((a, tr))
}

/// Powerlists: a tie-tree over elements whose frontier has length `2^k`.
/// Elements are naturals `s(..s(z))`; `s` becomes `succ(_, pad)`.
fn powerlist() -> Result<(Vtam, Translation)> {
    let tie = ContextDef::new(
        "tie",
        2,
        tie_context("tie"),
        &[
            ("tie2", 2, Category::Push),
            ("tie1", 2, Category::Cint1),
            ("tie0", 0, Category::Int0),
        ],
    );
    let succ = ContextDef::new(
        "s",
        1,
        Term::bin("succ", hole(1), Term::leaf("pad")),
        &[("succ", 2, Category::Int1), ("pad", 0, Category::Int0)],
    );
    let source = Signature::with_any_arity([
        SymbolDecl::new("z", 0),
        SymbolDecl::new("s", 1),
        SymbolDecl::new("tie", 2),
    ])?;
    let tr = Translation::new(source, &[("z", Category::Int0)], vec![tie, succ])?;
    let mut a = new_automaton(
        "powerlist",
        &tr,
        "f/2",
        &["qe", "qp", "q", "q0", "qf"],
        &["qf", "qe"],
    )?;
    let f = a.gamma.index_of("f").unwrap();
    let mut lines: Vec<(&str, &[&str], Guard, Action, &str)> = vec![
        ("z", &[], Guard::None, Action::EmitBot, "qe"),
        ("pad", &[], Guard::None, Action::EmitBot, "qp"),
        ("succ", &["qe", "qp"], Guard::None, Action::KeepLeft, "qe"),
        ("tie0", &[], Guard::None, Action::EmitBot, "q0"),
        ("tie2", &["q", "q0"], Guard::None, Action::PushWith(f), "qf"),
    ];
    // Elements have memory `bot`, ties never do, so mixed pairs fail the test.
    let pairs: [&[&str]; 4] = [&["qe", "qe"], &["qe", "qf"], &["qf", "qe"], &["qf", "qf"]];
    for p in pairs {
        lines.push(("tie1", p, Guard::RelPos, Action::KeepLeft, "q"));
    }
    rules_from(&mut a, &lines);
    Ok((a, tr))
}

/// The tie-tree over `elements` splitting as evenly as possible, left half larger.
pub fn powerlist_term(elements: &[usize]) -> Term {
    assert!(!elements.is_empty());
    if elements.len() == 1 {
        let mut t = Term::leaf("z");
        for _ in 0..elements[0] {
            t = Term::app("s", vec![t]);
        }
        return t;
    }
    let mid = elements.len().div_ceil(2);
    Term::bin(
        "tie",
        powerlist_term(&elements[..mid]),
        powerlist_term(&elements[mid..]),
    )
}

/// A CNF over variables `1..=n`; literals are nonzero, negative for negation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cnf {
    pub vars: usize,
    pub clauses: Vec<Vec<i32>>,
}

impl Cnf {
    pub fn new(vars: usize, clauses: Vec<Vec<i32>>) -> Result<Cnf> {
        for c in &clauses {
            for &l in c {
                if l == 0 || l.unsigned_abs() as usize > vars {
                    return Err(Error::Invalid(vec![format!(
                        "literal {l} outside variables 1..{vars}"
                    )]));
                }
            }
        }
        Ok(Cnf { vars, clauses })
    }

    /// Exhaustive check over all assignments.
    pub fn satisfiable(&self) -> bool {
        (0u64..1 << self.vars).any(|bits| {
            self.clauses.iter().all(|c| {
                c.iter().any(|&l| {
                    let v = bits >> (l.unsigned_abs() - 1) & 1 == 1;
                    v == (l > 0)
                })
            })
        })
    }
}

/// `p cnf n m` then clauses terminated by `0`; `c` lines are comments.
pub fn parse_dimacs(src: &str) -> Result<Cnf> {
    let mut header: Option<(usize, usize)> = None;
    let mut clauses = Vec::new();
    let mut cur = Vec::new();
    for (ln, line) in src.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('c') || line.starts_with('%') {
            continue;
        }
        let bad = |msg: String| Error::Syntax {
            line: ln + 1,
            col: 1,
            msg,
        };
        if line.starts_with('p') {
            let w: Vec<&str> = line.split_whitespace().collect();
            if w.len() != 4 || w[1] != "cnf" || header.is_some() {
                return Err(bad("expected a single `p cnf VARS CLAUSES` header".into()));
            }
            let n = w[2]
                .parse()
                .map_err(|_| bad(format!("bad variable count `{}`", w[2])))?;
            let m = w[3]
                .parse()
                .map_err(|_| bad(format!("bad clause count `{}`", w[3])))?;
            header = Some((n, m));
            continue;
        }
        if header.is_none() {
            return Err(bad("clause before the `p cnf` header".into()));
        }
        for tok in line.split_whitespace() {
            let l: i32 = tok
                .parse()
                .map_err(|_| bad(format!("bad literal `{tok}`")))?;
            if l == 0 {
                clauses.push(std::mem::take(&mut cur));
            } else {
                cur.push(l);
            }
        }
    }
    let (n, m) = header.ok_or_else(|| Error::Syntax {
        line: 1,
        col: 1,
        msg: "missing `p cnf` header".into(),
    })?;
    if !cur.is_empty() {
        clauses.push(cur);
    }
    if clauses.len() != m {
        return Err(Error::Invalid(vec![format!(
            "header announces {m} clauses, found {}",
            clauses.len()
        )]));
    }
    Cnf::new(n, clauses)
}

/// Membership instance equivalent to satisfiability of `cnf`.
///
/// Each clause becomes an `or`-chain over all variables; leaf `Xi` guesses
/// a value by pushing `zero` or `one`, so a clause's memory is the
/// assignment vector and its state records whether the clause holds.
/// Clauses are joined by `and`, which demands syntactically equal
/// memories: one assignment for every clause. Repeated literals collapse;
/// tautologies are dropped; no clauses at all is encoded by `top`.
pub fn encode_3sat(cnf: &Cnf) -> Result<(Term, Vtam)> {
    let n = cnf.vars;
    let mut clauses: Vec<BTreeMap<usize, bool>> = Vec::new();
    'outer: for c in &cnf.clauses {
        let mut lits = BTreeMap::new();
        for &l in c {
            let v = l.unsigned_abs() as usize;
            if lits.insert(v, l > 0).is_some_and(|old| old != (l > 0)) {
                continue 'outer;
            }
        }
        clauses.push(lits);
    }
    if n == 0 && !clauses.is_empty() {
        return Err(Error::Invalid(vec!["clauses without variables".into()]));
    }
    let mut decls: Vec<(String, usize, Category)> = (1..=n)
        .map(|i| (format!("X{i}"), 0, Category::Push))
        .collect();
    decls.extend([
        ("or".to_string(), 2, Category::Push),
        ("and".to_string(), 2, Category::Cint1),
        ("id".to_string(), 2, Category::Int1),
        ("not".to_string(), 2, Category::Int1),
        ("false".to_string(), 2, Category::Int1),
        ("pad".to_string(), 0, Category::Int0),
        ("top".to_string(), 0, Category::Int0),
    ]);
    let pairs: Vec<(&str, usize, Category)> =
        decls.iter().map(|(s, a, c)| (s.as_str(), *a, *c)).collect();
    let sigma = PartitionedSignature::from_pairs(&pairs)?;
    let mut a = Vtam::new(
        "sat3",
        sigma,
        Signature::from_spec("zero/0 one/0 or/2")?,
        Relation::SynEq,
    );
    for s in ["v0", "v1", "p", "q0", "q1"] {
        a.add_state(s);
    }
    a.finals.insert(4);
    let (v0, v1, p, q0, q1) = (0, 1, 2, 3, 4);
    let sym = |a: &Vtam, s: &str| a.symbol_index(s).unwrap();
    let (zero, one, or) = (0, 1, 2);
    for i in 1..=n {
        let x = sym(&a, &format!("X{i}"));
        a.add_rule(Rule::constant(x, Action::PushConst(zero), v0));
        a.add_rule(Rule::constant(x, Action::PushConst(one), v1));
    }
    a.add_rule(Rule::constant(sym(&a, "pad"), Action::EmitBot, p));
    a.add_rule(Rule::constant(sym(&a, "top"), Action::EmitBot, q1));
    for (name, on_false, on_true) in [("id", q0, q1), ("not", q1, q0), ("false", q0, q0)] {
        let s = sym(&a, name);
        a.add_rule(Rule::binary(
            s,
            v0,
            p,
            Guard::None,
            Action::KeepLeft,
            on_false,
        ));
        a.add_rule(Rule::binary(
            s,
            v1,
            p,
            Guard::None,
            Action::KeepLeft,
            on_true,
        ));
    }
    for (l, r) in [(q0, q0), (q0, q1), (q1, q0), (q1, q1)] {
        let t = if l == q1 || r == q1 { q1 } else { q0 };
        a.add_rule(Rule::binary(
            sym(&a, "or"),
            l,
            r,
            Guard::None,
            Action::PushWith(or),
            t,
        ));
    }
    a.add_rule(Rule::binary(
        sym(&a, "and"),
        q1,
        q1,
        Guard::RelPos,
        Action::KeepLeft,
        q1,
    ));
    a.validate()?;
    let lit = |c: &BTreeMap<usize, bool>, i: usize| {
        let d = match c.get(&i) {
            Some(true) => "id",
            Some(false) => "not",
            None => "false",
        };
        Term::bin(d, Term::leaf(format!("X{i}")), Term::leaf("pad"))
    };
    let clause_term = |c: &BTreeMap<usize, bool>| {
        let mut t = lit(c, n);
        for i in (1..n).rev() {
            t = Term::bin("or", lit(c, i), t);
        }
        t
    };
    let term = match clauses.split_last() {
        None => Term::leaf("top"),
        Some((last, rest)) => {
            let mut t = clause_term(last);
            for c in rest.iter().rev() {
                t = Term::bin("and", clause_term(c), t);
            }
            t
        }
    };
    Ok((term, a))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decide::member;
    use crate::term::parse_term_free;

    fn t(s: &str) -> Term {
        parse_term_free(s).unwrap()
    }

    #[test]
    fn contexts() {
        let (_, tr) = build_example("balanced").unwrap();
        assert_eq!(
            tr.translate_term(&t("g(a,a)")).unwrap(),
            t("g2(g1(a,a),g0)")
        );
        assert!(tr.language_guard().accepts(&t("g2(g1(a,a),g0)")));
        assert!(!tr.language_guard().accepts(&t("g1(a,a)")));
        let id = Translation::identity(
            PartitionedSignature::from_pairs(&[("a", 0, Category::Int0)]).unwrap(),
        );
        assert_eq!(id.translate_term(&t("a")).unwrap(), t("a"));
        let src =
            Signature::with_any_arity([SymbolDecl::new("a", 0), SymbolDecl::new("g", 3)]).unwrap();
        let ctx = Term::bin("g2", hole(1), Term::bin("g1", hole(2), hole(3)));
        let d = ContextDef::new(
            "g",
            3,
            ctx,
            &[("g2", 2, Category::Int1), ("g1", 2, Category::Int1)],
        );
        let tr = Translation::new(src, &[("a", Category::Int0)], vec![d]).unwrap();
        let g = Term::app("g", vec![t("a"), t("a"), t("a")]);
        assert_eq!(tr.translate_term(&g).unwrap(), t("g2(a,g1(a,a))"));
    }

    #[test]
    fn examples_small() {
        let (b, tr) = build_example("balanced").unwrap();
        let bal = |s: &str| member(&b, &tr.translate_term(&t(s)).unwrap()).unwrap();
        assert!(bal("a") && bal("g(a,a)"));
        assert!(!bal("g(g(a,a),a)") && !bal("g(a,g(a,a))"));
        assert!(bal("g(g(a,a),g(a,a))"));
        let (rb, tr) = build_example("redblack").unwrap();
        let ok = |s: &str| member(&rb, &tr.translate_term(&t(s)).unwrap()).unwrap();
        assert!(ok("n") && ok("B(n,n)") && ok("B(R(n,n),n)"));
        assert!(!ok("R(n,n)") && !ok("B(B(n,n),n)") && !ok("B(R(R(n,n),n),n)"));
        let (pl, tr) = build_example("powerlist").unwrap();
        let len = |k: usize| {
            member(
                &pl,
                &tr.translate_term(&powerlist_term(&vec![1; k])).unwrap(),
            )
            .unwrap()
        };
        assert!(len(1) && len(2) && len(4) && !len(3));
    }

    #[test]
    fn sat_examples() {
        let sat = |n, cs: Vec<Vec<i32>>| {
            let (t, a) = encode_3sat(&Cnf::new(n, cs).unwrap()).unwrap();
            member(&a, &t).unwrap()
        };
        assert!(sat(1, vec![vec![1, 1, 1]]));
        assert!(!sat(1, vec![vec![1, 1, 1], vec![-1, -1, -1]]));
        assert!(sat(0, vec![]));
        assert!(sat(2, vec![vec![1, -1, 2]]));
        let cnf = parse_dimacs("c demo\np cnf 2 2\n1 2 0\n-1 0\n").unwrap();
        assert_eq!(cnf.clauses, vec![vec![1, 2], vec![-1]]);
        assert!(parse_dimacs("1 2 0").is_err());
    }

    #[test]
    fn lifting() {
        let b = crate::ta::parse_ta(
            "ta b gamma { h/2 c/0 } states { s t } final { t } rules { c -> s ; h(s,s) -> t ; }",
        )
        .unwrap();
        let (frag, l) = lift_ta(&b).unwrap();
        let m = crate::oracle::brute_memory_bounded(&frag, 6).unwrap();
        assert_eq!(
            m[l.top].iter().cloned().collect::<Vec<_>>(),
            vec![t("h(c,c)")]
        );
        assert_eq!(
            m[l.states[0]].iter().cloned().collect::<Vec<_>>(),
            vec![t("c")]
        );
    }
}
