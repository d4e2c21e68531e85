//! Decision procedures built on saturation: memory languages, emptiness,
//! witnesses, membership, inclusion.

use std::collections::{BTreeSet, HashMap, HashSet};

use crate::encodings::lift_ta_to_memory;
use crate::error::{Error, Result};
use crate::model::{step_root, Category, Configuration, Guard, Relation, Rule, Runner, Vtam};
use crate::saturation::{saturate, MemoryTa, SaturationOptions};
use crate::ta::{ProductMode, Ta};
use crate::term::{Signature, SymbolDecl, Term};
use crate::transform::{complement, intersection};

#[derive(Debug, Clone, Copy)]
pub struct Budget {
    pub saturation_steps: usize,
    /// Largest input term tried by the witness search.
    pub witness_size: usize,
    /// Distinct behaviors kept by the witness search.
    pub behaviors: usize,
}

impl Default for Budget {
    fn default() -> Budget {
        Budget {
            saturation_steps: 5_000_000,
            witness_size: 64,
            behaviors: 200_000,
        }
    }
}

impl Budget {
    fn saturation(&self) -> SaturationOptions {
        SaturationOptions {
            max_steps: self.saturation_steps,
            ..SaturationOptions::default()
        }
    }
}

/// `M(a, q)` for every state of `a`, as tree automata over `gamma ∪ {bot}`.
#[derive(Debug, Clone)]
pub struct MemoryLanguages {
    pub shared: MemoryTa,
    pub states: Vec<String>,
}

impl MemoryLanguages {
    pub fn of(&self, q: usize) -> Ta {
        let mut t = self.shared.for_state(q);
        t.name = format!("M_{}", self.states[q]);
        t
    }

    pub fn nonempty(&self, q: usize) -> bool {
        !self.of(q).is_empty()
    }
}

fn refuse_bt(a: &Vtam) -> Result<()> {
    if a.has_bt() {
        return Err(Error::Unsupported(
            "emptiness with input-term (brother) constraints is not decided here".into(),
        ));
    }
    Ok(())
}

/// Requires positive constraints only; see [`eliminate_negative`].
pub fn memory_languages(a: &Vtam) -> Result<MemoryLanguages> {
    memory_languages_with(a, Budget::default())
}

pub fn memory_languages_with(a: &Vtam, b: Budget) -> Result<MemoryLanguages> {
    refuse_bt(a)?;
    if a.has_guard(|g| g == Guard::RelNeg) {
        return Err(Error::Unsupported(
            "negative constraints present; eliminate them first".into(),
        ));
    }
    let shared = saturate(a, b.saturation())?.extract();
    Ok(MemoryLanguages {
        shared,
        states: a.states.clone(),
    })
}

/// The memory classes of a state's language under the relation.
enum Classes {
    Empty,
    /// Every memory is related to the term; the TA accepts everything unrelated to it.
    Single(Term, Ta),
    Many,
}

/// Memories structurally equal to `m`.
fn shape_ta(m: &Term, gamma: &Signature) -> Ta {
    let mut ta = Ta::new("shape", gamma);
    let leaf = ta.add_state("leaf");
    let g = ta.gamma.clone();
    for (i, d) in g.decls().iter().enumerate() {
        if d.arity == 0 {
            ta.add_rule(i, vec![], leaf);
        }
    }
    fn go(m: &Term, ta: &mut Ta, leaf: usize, memo: &mut HashMap<Term, usize>) -> usize {
        if m.arity() == 0 {
            return leaf;
        }
        if let Some(&s) = memo.get(m) {
            return s;
        }
        let l = go(m.kid(0), ta, leaf, memo);
        let r = go(m.kid(1), ta, leaf, memo);
        let s = ta.add_state(format!("n{}", memo.len()));
        let bins: Vec<usize> = (0..ta.gamma.len())
            .filter(|&i| ta.gamma.decls()[i].arity == 2)
            .collect();
        for h in bins {
            ta.add_rule(h, vec![l, r], s);
        }
        memo.insert(m.clone(), s);
        s
    }
    let root = go(m, &mut ta, leaf, &mut HashMap::new());
    ta.finals.insert(root);
    ta
}

fn classes(lang: &Ta, relation: Relation, gamma: &Signature) -> Result<Classes> {
    let Ok(m) = lang.witness() else {
        return Ok(Classes::Empty);
    };
    let unrelated = match relation {
        Relation::SynEq => Ta::complement_of_finite_set(&[m.clone()].into_iter().collect(), gamma)?,
        Relation::StructEq => shape_ta(&m, gamma).complement(),
        Relation::None => return Err(Error::Invalid(vec!["constraint without a relation".into()])),
    };
    if lang.product(&unrelated, ProductMode::Intersect)?.is_empty() {
        Ok(Classes::Single(m, unrelated))
    } else {
        Ok(Classes::Many)
    }
}

pub fn eliminate_negative(a: &Vtam) -> Result<Vtam> {
    eliminate_negative_with(a, Budget::default())
}

/// An automaton without negative constraints and with the same memory
/// language at every original state. Each negative rule is settled by the
/// classes of its partner state's language, recomputed until stable:
/// no memory drops the rule, one class turns it into a positive test
/// against the complement of that class, several classes make it
/// unconditional. Extra states and symbols are appended.
pub fn eliminate_negative_with(a: &Vtam, b: Budget) -> Result<Vtam> {
    Ok(eliminate_negative_report(a, b)?.0)
}

/// How a negative rule was settled.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NegCase {
    /// The partner state has no memory.
    Removed,
    /// One class of partner memories: a positive test against its complement.
    Complemented,
    /// Several classes: every kept memory passes.
    Unconditional,
}

/// [`eliminate_negative_with`] plus the case applied to each negative rule, in rule order.
pub fn eliminate_negative_report(a: &Vtam, b: Budget) -> Result<(Vtam, Vec<NegCase>)> {
    refuse_bt(a)?;
    let neg: Vec<usize> = (0..a.rules.len())
        .filter(|&i| a.rules[i].guard == Guard::RelNeg)
        .collect();
    if neg.is_empty() {
        return Ok((a.clone(), Vec::new()));
    }
    let mut status: Vec<Status> = vec![Status::Off; neg.len()];
    loop {
        let built = build_positive(a, &neg, &status)?;
        let shared = saturate(&built, b.saturation())?.extract();
        let mut next = Vec::with_capacity(neg.len());
        for &ri in &neg {
            let r = &a.rules[ri];
            let partner = r.left[1 - a.category(r.symbol).kept_child().expect("cint")];
            next.push(
                match classes(&shared.for_state(partner), a.relation, &a.gamma)? {
                    Classes::Empty => Status::Off,
                    Classes::Single(m, t) => Status::Single(m, t),
                    Classes::Many => Status::Many,
                },
            );
        }
        let stable = status.iter().zip(&next).all(|(x, y)| match (x, y) {
            (Status::Off, Status::Off) | (Status::Many, Status::Many) => true,
            (Status::Single(m1, _), Status::Single(m2, _)) => a.relation.holds(m1, m2),
            _ => false,
        });
        if stable {
            let cases = status
                .iter()
                .map(|s| match s {
                    Status::Off => NegCase::Removed,
                    Status::Single(..) => NegCase::Complemented,
                    Status::Many => NegCase::Unconditional,
                })
                .collect();
            return Ok((built, cases));
        }
        status = next;
    }
}

#[derive(Clone)]
enum Status {
    Off,
    Single(Term, Ta),
    Many,
}

fn build_positive(a: &Vtam, neg: &[usize], status: &[Status]) -> Result<Vtam> {
    let negset: HashSet<usize> = neg.iter().copied().collect();
    let mut out = a.clone();
    out.rules = a
        .rules
        .iter()
        .enumerate()
        .filter(|(i, _)| !negset.contains(i))
        .map(|(_, r)| r.clone())
        .collect();
    for (&ri, st) in neg.iter().zip(status) {
        let r = &a.rules[ri];
        let kept = a.category(r.symbol).kept_child().expect("cint");
        match st {
            Status::Off => {}
            Status::Single(_, unrelated) => {
                let top = lift_ta_to_memory(&mut out, unrelated, "unrel")?.top;
                let mut left = r.left.clone();
                left[1 - kept] = top;
                out.add_rule(Rule {
                    left,
                    guard: Guard::RelPos,
                    ..r.clone()
                });
            }
            Status::Many => {
                let cat = if kept == 0 {
                    Category::Int1
                } else {
                    Category::Int2
                };
                let name = out
                    .sigma
                    .base()
                    .fresh_name(&format!("{}_any", a.sigma.name(r.symbol)));
                let sym = out.sigma.add(SymbolDecl::new(name, 2), cat)?;
                out.add_rule(Rule {
                    symbol: sym,
                    guard: Guard::None,
                    ..r.clone()
                });
            }
        }
    }
    Ok(out)
}

pub fn is_empty(a: &Vtam) -> Result<bool> {
    is_empty_with(a, Budget::default())
}

/// Emptiness from the propositional atoms of the saturated clause set.
pub fn is_empty_with(a: &Vtam, b: Budget) -> Result<bool> {
    refuse_bt(a)?;
    let pos = eliminate_negative_with(a, b)?;
    let s = saturate(&pos, b.saturation())?;
    Ok(!a.finals.iter().any(|&q| s.nonempty(q)))
}

pub fn witness(a: &Vtam) -> Result<Option<Term>> {
    witness_with(a, Budget::default())
}

/// A minimal-size accepted term, or `None` when the language is empty.
///
/// Terms are explored by size, one representative per set of root
/// configurations; two terms with the same configurations are
/// interchangeable in every context.
pub fn witness_with(a: &Vtam, b: Budget) -> Result<Option<Term>> {
    if is_empty_with(a, b)? {
        return Ok(None);
    }
    type Behavior = Vec<Configuration>;
    let mut layers: Vec<Vec<(Term, Behavior)>> = vec![Vec::new(); b.witness_size + 1];
    let mut seen: HashSet<Behavior> = HashSet::new();
    let accepting = |beh: &Behavior| beh.iter().any(|c| a.is_final(c.state));
    for n in 1..=b.witness_size {
        let mut cands: Vec<(String, Term, Behavior)> = Vec::new();
        for (sym, name, arity, _) in a.sigma.iter() {
            if arity == 0 && n == 1 {
                let beh: Behavior = step_root(a, sym, &[]).into_iter().collect();
                cands.push((name.to_string(), Term::leaf(name), beh));
            }
            if arity == 2 && n >= 3 {
                for i in 1..n - 1 {
                    let j = n - 1 - i;
                    for (t1, b1) in &layers[i] {
                        for (t2, b2) in &layers[j] {
                            let mut beh: BTreeSet<Configuration> = BTreeSet::new();
                            for c1 in b1 {
                                for c2 in b2 {
                                    beh.extend(step_root(
                                        a,
                                        sym,
                                        &[(c1.clone(), t1.clone()), (c2.clone(), t2.clone())],
                                    ));
                                }
                            }
                            let t = Term::bin(name, t1.clone(), t2.clone());
                            cands.push((t.to_string(), t, beh.into_iter().collect()));
                        }
                    }
                }
            }
        }
        cands.sort_by(|x, y| x.0.cmp(&y.0));
        for (_, t, beh) in cands {
            if beh.is_empty() || seen.contains(&beh) {
                continue;
            }
            if accepting(&beh) {
                return Ok(Some(t));
            }
            seen.insert(beh.clone());
            if seen.len() > b.behaviors {
                return Err(Error::Budget(format!(
                    "witness search kept more than {} behaviors",
                    b.behaviors
                )));
            }
            layers[n].push((t, beh));
        }
    }
    Err(Error::Budget(format!(
        "no witness up to size {} although the language is nonempty",
        b.witness_size
    )))
}

/// Membership by memoized configuration sets; a deterministic automaton
/// keeps one configuration per subterm.
pub fn member(a: &Vtam, t: &Term) -> Result<bool> {
    member_with(a, t, crate::model::DEFAULT_RUN_BUDGET)
}

pub fn member_with(a: &Vtam, t: &Term, max_configs: usize) -> Result<bool> {
    t.check(a.sigma.base())?;
    Runner::new(a).with_budget(max_configs).accepts(t)
}

/// Whether some input term has no run because a pop meets a non-`bot` constant.
pub fn has_stuck_terms(a: &Vtam) -> bool {
    let has = |c: Category| a.sigma.has_category(|x| x == c);
    let push_const = a
        .sigma
        .iter()
        .any(|(_, _, ar, c)| c == Category::Push && ar == 0);
    push_const
        && (has(Category::Pop11)
            || has(Category::Pop12)
            || has(Category::Pop21)
            || has(Category::Pop22))
}

/// A term in `L(a1) \ L(a2)`, if any.
pub fn inclusion_counterexample(a1: &Vtam, a2: &Vtam, b: Budget) -> Result<Option<Term>> {
    refuse_bt(a1)?;
    refuse_bt(a2)?;
    let diff = intersection(a1, &complement(a2)?)?;
    witness_with(&diff, b)
}

pub fn included(a1: &Vtam, a2: &Vtam) -> Result<bool> {
    included_with(a1, a2, Budget::default())
}

pub fn included_with(a1: &Vtam, a2: &Vtam, b: Budget) -> Result<bool> {
    refuse_bt(a1)?;
    refuse_bt(a2)?;
    is_empty_with(&intersection(a1, &complement(a2)?)?, b)
}

pub fn universal(a: &Vtam) -> Result<bool> {
    universal_with(a, Budget::default())
}

/// Stuck terms are rejected by every automaton, so their existence rules
/// universality out.
pub fn universal_with(a: &Vtam, b: Budget) -> Result<bool> {
    refuse_bt(a)?;
    let c = complement(a)?;
    Ok(!has_stuck_terms(a) && is_empty_with(&c, b)?)
}

pub fn equivalent(a1: &Vtam, a2: &Vtam) -> Result<bool> {
    Ok(included(a1, a2)? && included(a2, a1)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::format::parse_vtam;
    use crate::term::parse_term_free;

    const BALANCED: &str = "vtam balanced relation struct
        sigma { int0: a/0 g0/0 ; cint1: g1/2 ; push: g2/2 } gamma { f/2 }
        states { q q0 qf } final { qf }
        rules { a -> qf(bot) ; g0 -> q0(bot) ; g1(qf(y1), qf(y2)) -[eq]-> q(y1) ; g2(q(y1), q0(y2)) -> qf(f(y1,y2)) ; }";

    fn t(s: &str) -> Term {
        parse_term_free(s).unwrap()
    }

    #[test]
    fn balanced_basics() {
        let a = parse_vtam(BALANCED).unwrap();
        assert!(!is_empty(&a).unwrap());
        assert_eq!(witness(&a).unwrap(), Some(t("a")));
        assert!(member(&a, &t("g2(g1(a,a),g0)")).unwrap());
        assert!(!member(&a, &t("g2(g1(a,g2(g1(a,a),g0)),g0)")).unwrap());
        let m = memory_languages(&a).unwrap();
        let qf = m.of(2);
        assert!(qf.accepts(&t("f(bot,bot)")) && qf.accepts(&t("bot")));
        assert!(qf.accepts(&t("f(f(bot,bot),bot)")) && !qf.accepts(&t("f(bot,f(bot,bot))")));
    }

    #[test]
    fn negative_guard_with_one_partner_class() {
        // r holds only `bot`; the unequal test keeps memories of another shape.
        let src = "vtam n relation struct sigma { int0: a/0 ; push: f/2 ; cint1: c/2 } gamma { h/2 }
                   states { q r s } final { s }
                   rules { a -> q(bot) ; a -> r(bot) ; f(q(y1), q(y2)) -> q(h(y1,y2)) ; c(q(y1), r(y2)) -[neq]-> s(y1) ; }";
        let a = parse_vtam(src).unwrap();
        assert!(memory_languages(&a).is_err());
        let m = memory_languages(&eliminate_negative(&a).unwrap()).unwrap();
        let s = m.of(2);
        assert!(!s.accepts(&t("bot")));
        assert!(s.accepts(&t("h(bot,bot)")));
        assert_eq!(witness(&a).unwrap(), Some(t("c(f(a,a),a)")));
    }

    #[test]
    fn inclusion_and_universality() {
        let src = "vtam u relation none sigma { int0: a/0 ; int1: g/2 } gamma { } states { q } final { q }
                   rules { a -> q(bot) ; g(q(y1), q(y2)) -> q(y1) ; }";
        let u = parse_vtam(src).unwrap();
        assert!(universal(&u).unwrap());
        let only_a = parse_vtam(&src.replace("g(q(y1), q(y2)) -> q(y1) ;", "")).unwrap();
        assert!(included(&only_a, &u).unwrap());
        assert!(!included(&u, &only_a).unwrap());
        assert!(!equivalent(&u, &only_a).unwrap());
        assert_eq!(
            inclusion_counterexample(&u, &only_a, Budget::default()).unwrap(),
            Some(t("g(a,a)"))
        );
    }
}
