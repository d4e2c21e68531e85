//! Reader and writer for the automaton file format.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::lex::{Cursor, Tok};
use crate::model::{Action, Category, Guard, PartitionedSignature, Relation, Rule, Vtam};
use crate::term::{Signature, SymbolDecl, BOT};

/// Memory pattern on one side of a rule, before name resolution.
#[derive(Debug, Clone, PartialEq)]
enum Pat {
    Var(String),
    Bot,
    Const(String),
    App(String, String, String),
}

struct RawRule {
    line: usize,
    symbol: String,
    left: Vec<(String, Pat)>,
    guard: Option<String>,
    target: String,
    rhs: Pat,
}

/// Parses an automaton. Name resolution problems come back as one
/// `Error::Invalid` listing every issue; the result is not validated.
pub fn parse_vtam(src: &str) -> Result<Vtam> {
    let mut cur = Cursor::new(src)?;
    cur.expect_keyword("vtam")?;
    let name = cur.expect_ident()?;
    let mut relation = None;
    let mut sigma: Option<Vec<(SymbolDecl, Category)>> = None;
    let mut gamma = None;
    let mut states = None;
    let mut finals = None;
    let mut rules = None;
    while !cur.at_end() {
        let kw = cur.expect_ident()?;
        let dup = |cur: &Cursor| cur.error(format!("section `{kw}` given twice"));
        match kw.as_str() {
            "relation" => {
                if relation.is_some() {
                    return Err(dup(&cur));
                }
                let r = cur.expect_ident()?;
                relation = Some(
                    Relation::from_keyword(&r)
                        .ok_or_else(|| cur.error(format!("unknown relation `{r}`")))?,
                );
            }
            "sigma" => {
                if sigma.is_some() {
                    return Err(dup(&cur));
                }
                sigma = Some(parse_sigma(&mut cur)?);
            }
            "gamma" => {
                if gamma.is_some() {
                    return Err(dup(&cur));
                }
                gamma = Some(parse_decl_block(&mut cur)?);
            }
            "states" => {
                if states.is_some() {
                    return Err(dup(&cur));
                }
                states = Some(parse_name_block(&mut cur)?);
            }
            "final" => {
                if finals.is_some() {
                    return Err(dup(&cur));
                }
                finals = Some(parse_name_block(&mut cur)?);
            }
            "rules" => {
                if rules.is_some() {
                    return Err(dup(&cur));
                }
                rules = Some(parse_rules(&mut cur)?);
            }
            other => return Err(cur.error(format!("unknown section `{other}`"))),
        }
    }
    let sigma = PartitionedSignature::new(sigma.ok_or_else(|| Error::Syntax {
        line: 1,
        col: 1,
        msg: "missing `sigma` section".into(),
    })?)?;
    let gamma_decls = gamma.unwrap_or_default();
    if let Some(d) = gamma_decls.iter().find(|d| d.name == BOT) {
        return Err(Error::Signature(format!(
            "`{}` is implicit and must not be declared in gamma",
            d.name
        )));
    }
    let gamma = Signature::new(gamma_decls)?;
    let mut a = Vtam::new(name, sigma, gamma, relation.unwrap_or(Relation::None));
    let mut diags = Vec::new();
    for s in states.unwrap_or_default() {
        if a.state_index(&s).is_some() {
            diags.push(format!("duplicate state `{s}`"));
        } else {
            a.add_state(s);
        }
    }
    let mut fin = BTreeSet::new();
    for s in finals.unwrap_or_default() {
        match a.state_index(&s) {
            Some(q) => {
                fin.insert(q);
            }
            None => diags.push(format!("final state `{s}` is not declared in states")),
        }
    }
    a.finals = fin;
    for raw in rules.unwrap_or_default() {
        match resolve_rule(&a, &raw) {
            Ok(r) => a.add_rule(r),
            Err(msg) => diags.push(format!("rule at line {}: {msg}", raw.line)),
        }
    }
    if diags.is_empty() {
        Ok(a)
    } else {
        Err(Error::Invalid(diags))
    }
}

/// Parses and validates.
pub fn load_vtam(src: &str) -> Result<Vtam> {
    let a = parse_vtam(src)?;
    a.validate()?;
    Ok(a)
}

fn parse_sigma(cur: &mut Cursor) -> Result<Vec<(SymbolDecl, Category)>> {
    cur.expect_punct('{')?;
    let mut out = Vec::new();
    loop {
        if cur.eat_punct('}') {
            return Ok(out);
        }
        if cur.eat_punct(';') {
            continue;
        }
        let kw = cur.expect_ident()?;
        let cat = Category::from_keyword(&kw)
            .ok_or_else(|| cur.error(format!("unknown category `{kw}`")))?;
        cur.expect_punct(':')?;
        while let Some(Tok::Ident(_)) = cur.peek() {
            out.push((parse_decl(cur)?, cat));
        }
    }
}

fn parse_decl(cur: &mut Cursor) -> Result<SymbolDecl> {
    let name = cur.expect_ident()?;
    cur.expect_punct('/')?;
    let arity = cur.expect_num()? as usize;
    Ok(SymbolDecl::new(name, arity))
}

pub(crate) fn parse_decl_block(cur: &mut Cursor) -> Result<Vec<SymbolDecl>> {
    cur.expect_punct('{')?;
    let mut out = Vec::new();
    loop {
        if cur.eat_punct('}') {
            return Ok(out);
        }
        if cur.eat_punct(';') {
            continue;
        }
        out.push(parse_decl(cur)?);
    }
}

pub(crate) fn parse_name_block(cur: &mut Cursor) -> Result<Vec<String>> {
    cur.expect_punct('{')?;
    let mut out = Vec::new();
    loop {
        if cur.eat_punct('}') {
            return Ok(out);
        }
        if cur.eat_punct(';') || cur.eat_punct(',') {
            continue;
        }
        out.push(cur.expect_ident()?);
    }
}

fn parse_rules(cur: &mut Cursor) -> Result<Vec<RawRule>> {
    cur.expect_punct('{')?;
    let mut out = Vec::new();
    loop {
        if cur.eat_punct('}') {
            return Ok(out);
        }
        let line = cur.here().0;
        let symbol = cur.expect_ident()?;
        let mut left = Vec::new();
        if cur.eat_punct('(') {
            for k in 1..=2 {
                let q = cur.expect_ident()?;
                cur.expect_punct('(')?;
                let p = parse_pat(cur, &format!("y{k}"), &[format!("y{k}1"), format!("y{k}2")])?;
                cur.expect_punct(')')?;
                left.push((q, p));
                if k == 1 {
                    cur.expect_punct(',')?;
                }
            }
            cur.expect_punct(')')?;
        }
        let guard = match cur.next() {
            Some(Tok::Arrow) => None,
            Some(Tok::Guarded(l)) => Some(l),
            _ => return Err(cur.error("expected `->` or `-[label]->`")),
        };
        let target = cur.expect_ident()?;
        cur.expect_punct('(')?;
        let rhs = parse_rhs(cur, left.is_empty())?;
        cur.expect_punct(')')?;
        cur.expect_punct(';')?;
        out.push(RawRule {
            line,
            symbol,
            left,
            guard,
            target,
            rhs,
        });
    }
}

/// Left-hand child memory: the variable `var`, `bot`, or `h(sub1,sub2)`.
fn parse_pat(cur: &mut Cursor, var: &str, sub: &[String; 2]) -> Result<Pat> {
    let id = cur.expect_ident()?;
    if id == BOT {
        return Ok(Pat::Bot);
    }
    if cur.eat_punct('(') {
        let a = cur.expect_ident()?;
        cur.expect_punct(',')?;
        let b = cur.expect_ident()?;
        cur.expect_punct(')')?;
        if a != sub[0] || b != sub[1] {
            return Err(cur.error(format!(
                "expected variables `{}`, `{}` under `{id}`",
                sub[0], sub[1]
            )));
        }
        return Ok(Pat::App(id, a, b));
    }
    if id != var {
        return Err(cur.error(format!("expected memory variable `{var}`, found `{id}`")));
    }
    Ok(Pat::Var(id))
}

const VARS: [&str; 6] = ["y1", "y2", "y11", "y12", "y21", "y22"];

fn parse_rhs(cur: &mut Cursor, constant: bool) -> Result<Pat> {
    let id = cur.expect_ident()?;
    if id == BOT {
        return Ok(Pat::Bot);
    }
    if cur.eat_punct('(') {
        let a = cur.expect_ident()?;
        cur.expect_punct(',')?;
        let b = cur.expect_ident()?;
        cur.expect_punct(')')?;
        if a != "y1" || b != "y2" {
            return Err(cur.error(format!("a pushed memory must be `{id}(y1,y2)`")));
        }
        return Ok(Pat::App(id, a, b));
    }
    if VARS.contains(&id.as_str()) {
        if constant {
            return Err(cur.error(format!("variable `{id}` in a constant rule")));
        }
        return Ok(Pat::Var(id));
    }
    Ok(Pat::Const(id))
}

fn resolve_rule(a: &Vtam, raw: &RawRule) -> std::result::Result<Rule, String> {
    let symbol = a
        .symbol_index(&raw.symbol)
        .ok_or_else(|| format!("unknown input symbol `{}`", raw.symbol))?;
    let state = |s: &str| {
        a.state_index(s)
            .ok_or_else(|| format!("undeclared state `{s}`"))
    };
    let target = state(&raw.target)?;
    let guard = match &raw.guard {
        None => Guard::None,
        Some(l) => Guard::from_label(l).ok_or_else(|| format!("unknown guard `{l}`"))?,
    };
    let arity = a.sigma.arity(symbol);
    if arity != raw.left.len() {
        return Err(format!("`{}` has arity {arity}", raw.symbol));
    }
    let gamma_sym = |h: &str, ar: usize| -> std::result::Result<usize, String> {
        match a.gamma.index_of(h) {
            Some(i) if a.gamma.decls()[i].arity == ar => Ok(i),
            Some(_) => Err(format!("memory symbol `{h}` used with arity {ar}")),
            None => Err(format!("unknown memory symbol `{h}`")),
        }
    };
    let cat = a.sigma.category(symbol);
    let violated = || format!("visibility violated: rule shape does not match category {cat}");
    if raw.left.is_empty() {
        let action = match &raw.rhs {
            Pat::Bot => Action::EmitBot,
            Pat::Const(c) => Action::PushConst(gamma_sym(c, 0)?),
            _ => return Err(violated()),
        };
        let mut r = Rule::constant(symbol, action, target);
        r.guard = guard;
        return Ok(r);
    }
    let q1 = state(&raw.left[0].0)?;
    let q2 = state(&raw.left[1].0)?;
    let (p1, p2) = (&raw.left[0].1, &raw.left[1].1);
    let var = |p: &Pat, v: &str| matches!(p, Pat::Var(x) if x == v);
    let action = match (p1, p2, &raw.rhs) {
        (Pat::Var(_), Pat::Var(_), Pat::App(h, _, _)) => Action::PushWith(gamma_sym(h, 2)?),
        (Pat::Var(_), Pat::Var(_), r) if var(r, "y1") => Action::KeepLeft,
        (Pat::Var(_), Pat::Var(_), r) if var(r, "y2") => Action::KeepRight,
        (Pat::App(h, ..), Pat::Var(_), r) if var(r, "y11") => {
            Action::PopLeftOfLeft(gamma_sym(h, 2)?)
        }
        (Pat::App(h, ..), Pat::Var(_), r) if var(r, "y12") => {
            Action::PopRightOfLeft(gamma_sym(h, 2)?)
        }
        (Pat::Var(_), Pat::App(h, ..), r) if var(r, "y21") => {
            Action::PopLeftOfRight(gamma_sym(h, 2)?)
        }
        (Pat::Var(_), Pat::App(h, ..), r) if var(r, "y22") => {
            Action::PopRightOfRight(gamma_sym(h, 2)?)
        }
        (Pat::Bot, Pat::Var(_), Pat::Bot) if matches!(cat, Category::Pop11 | Category::Pop12) => {
            Action::PopBottom
        }
        (Pat::Var(_), Pat::Bot, Pat::Bot) if matches!(cat, Category::Pop21 | Category::Pop22) => {
            Action::PopBottom
        }
        _ => return Err(violated()),
    };
    Ok(Rule::binary(symbol, q1, q2, guard, action, target))
}

/// Writes an automaton so that `parse_vtam(print_vtam(a)) == a`.
pub fn print_vtam(a: &Vtam) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "vtam {}", a.name);
    let _ = writeln!(s, "relation {}", a.relation.keyword());
    let mut groups: Vec<(Category, Vec<String>)> = Vec::new();
    for (_, name, arity, cat) in a.sigma.iter() {
        match groups.last_mut() {
            Some((c, v)) if *c == cat => v.push(format!("{name}/{arity}")),
            _ => groups.push((cat, vec![format!("{name}/{arity}")])),
        }
    }
    let parts: Vec<String> = groups
        .iter()
        .map(|(c, v)| format!("{}: {}", c.keyword(), v.join(" ")))
        .collect();
    let _ = writeln!(s, "sigma {{ {} }}", parts.join(" ; "));
    let _ = writeln!(s, "gamma {{ {} }}", a.gamma);
    let _ = writeln!(s, "states {{ {} }}", a.states.join(" "));
    let fin: Vec<&str> = a.finals.iter().map(|&q| a.states[q].as_str()).collect();
    let _ = writeln!(s, "final {{ {} }}", fin.join(" "));
    s.push_str("rules {\n");
    for r in &a.rules {
        let _ = writeln!(s, "  {} ;", a.show_rule(r));
    }
    s.push_str("}\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "vtam sample
relation struct
sigma { push: f/2 a/0 ; pop11: p/2 ; int0: e/0 ; int1: i/2 ; cint1: c/2 ; bt1: t/2 }
gamma { h/2 k/0 }            # bot/0 is implicit
states { q0 q1 }
final  { q1 }
rules {
  a -> q0(k) ;
  f(q0(y1), q1(y2)) -> q1(h(y1,y2)) ;
  p(q0(h(y11,y12)), q1(y2)) -> q0(y11) ;
  p(q0(bot), q1(y2)) -> q0(bot) ;
  e -> q0(bot) ;
  i(q0(y1), q1(y2)) -> q0(y1) ;
  c(q0(y1), q1(y2)) -[eq]-> q0(y1) ;
  c(q0(y1), q1(y2)) -[neq]-> q0(y1) ;
  t(q0(y1), q1(y2)) -[bt-eq]-> q0(y1) ;
}";

    #[test]
    fn sample_parses_and_round_trips() {
        let a = load_vtam(SAMPLE).unwrap();
        assert_eq!(a.rules.len(), 9);
        assert_eq!(a.rules[3].action, Action::PopBottom);
        let again = parse_vtam(&print_vtam(&a)).unwrap();
        assert_eq!(again, a);
    }

    #[test]
    fn bad_templates_are_syntax_errors() {
        let src = SAMPLE.replace("p(q0(h(y11,y12))", "p(q0(h(y1,y12))");
        assert!(matches!(parse_vtam(&src), Err(Error::Syntax { .. })));
        let src = SAMPLE.replace("i(q0(y1), q1(y2))", "i(q0(y2), q1(y2))");
        assert!(matches!(parse_vtam(&src), Err(Error::Syntax { .. })));
    }

    #[test]
    fn bottom_on_wrong_side_is_reported() {
        let src = SAMPLE.replace("p(q0(bot), q1(y2))", "p(q0(y1), q1(bot))");
        match parse_vtam(&src) {
            Err(Error::Invalid(d)) => assert!(d[0].contains("visibility violated"), "{d:?}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_names_are_invalid() {
        let src = SAMPLE.replace("final  { q1 }", "final { q9 }");
        assert!(matches!(parse_vtam(&src), Err(Error::Invalid(_))));
        let src = SAMPLE.replace("e -> q0(bot)", "e -> q7(bot)");
        assert!(matches!(parse_vtam(&src), Err(Error::Invalid(_))));
    }
}
