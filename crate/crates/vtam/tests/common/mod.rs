#![allow(dead_code)]

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use vtam::{
    Action, Category, Guard, PartitionedSignature, Relation, Rule, Signature, SymbolDecl, Term,
    Vtam,
};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Debug, Clone, Copy)]
pub struct Gen {
    pub relation: Relation,
    pub bt: bool,
    pub positive: bool,
    pub negative: bool,
    pub max_states: usize,
    pub max_symbols: usize,
    pub max_gamma: usize,
    pub max_rules: usize,
    pub min_states: usize,
}

impl Gen {
    pub fn new(relation: Relation) -> Gen {
        Gen {
            relation,
            bt: false,
            positive: relation != Relation::None,
            negative: false,
            max_states: 3,
            max_symbols: 6,
            max_gamma: 3,
            max_rules: 3,
            min_states: 1,
        }
    }
}

/// A random valid automaton. Symbol 0 is always an INT0 constant so ground
/// terms exist; the memory signature always has a binary symbol.
pub fn random_vtam(r: &mut ChaCha8Rng, g: &Gen) -> Vtam {
    let mut gamma = vec![SymbolDecl::new("h", 2)];
    for (i, name) in ["k", "c"].iter().enumerate() {
        if gamma.len() < g.max_gamma && r.gen_bool(0.5) {
            gamma.push(SymbolDecl::new(
                *name,
                if i == 0 { r.gen_range(0..2) * 2 } else { 0 },
            ));
        }
    }
    let gamma = Signature::new(gamma).unwrap();
    let has_const = gamma.decls().iter().any(|d| d.arity == 0);
    let mut pool = vec![
        (2, Category::Push),
        (2, Category::Pop11),
        (2, Category::Pop12),
        (2, Category::Pop21),
        (2, Category::Pop22),
        (2, Category::Int1),
        (2, Category::Int2),
        (0, Category::Int0),
    ];
    if has_const {
        pool.push((0, Category::Push));
    }
    if g.relation != Relation::None && (g.positive || g.negative) {
        pool.push((2, Category::Cint1));
        pool.push((2, Category::Cint2));
    }
    if g.bt {
        pool.push((2, Category::Bt1));
        pool.push((2, Category::Bt2));
    }
    let n_sym = r.gen_range(2..=g.max_symbols);
    let mut decls = vec![(SymbolDecl::new("a", 0), Category::Int0)];
    for i in 1..n_sym {
        let &(ar, cat) = pool.choose(r).unwrap();
        decls.push((SymbolDecl::new(format!("s{i}"), ar), cat));
    }
    let sigma = PartitionedSignature::new(decls).unwrap();
    random_rules(r, g, sigma, gamma)
}

/// Fresh states and rules over an existing alphabet pair.
pub fn random_partner(r: &mut ChaCha8Rng, g: &Gen, a: &Vtam) -> Vtam {
    random_rules(r, g, a.sigma.clone(), a.gamma.clone())
}

fn random_rules(
    r: &mut ChaCha8Rng,
    g: &Gen,
    sigma: PartitionedSignature,
    gamma: Signature,
) -> Vtam {
    let mut a = Vtam::new("rand", sigma, gamma.clone(), g.relation);
    let nq = r.gen_range(g.min_states..=g.max_states);
    for q in 0..nq {
        a.add_state(format!("q{q}"));
    }
    for q in 0..nq {
        if r.gen_bool(0.5) {
            a.finals.insert(q);
        }
    }
    if a.finals.is_empty() {
        a.finals.insert(r.gen_range(0..nq));
    }
    let bins: Vec<usize> = (0..gamma.len())
        .filter(|&i| gamma.decls()[i].arity == 2)
        .collect();
    let consts: Vec<usize> = (0..gamma.len())
        .filter(|&i| gamma.decls()[i].arity == 0)
        .collect();
    let syms: Vec<(usize, usize, Category)> =
        a.sigma.iter().map(|(i, _, ar, c)| (i, ar, c)).collect();
    for (s, ar, cat) in syms {
        let n = if ar == 0 {
            r.gen_range(1..=2)
        } else {
            r.gen_range(0..=g.max_rules)
        };
        for _ in 0..n {
            let target = r.gen_range(0..nq);
            if ar == 0 {
                let act = if cat == Category::Int0 {
                    Action::EmitBot
                } else {
                    Action::PushConst(*consts.choose(r).unwrap())
                };
                a.add_rule(Rule::constant(s, act, target));
                continue;
            }
            let (q1, q2) = (r.gen_range(0..nq), r.gen_range(0..nq));
            let h = *bins.choose(r).unwrap();
            let (guard, action) = match cat {
                Category::Push => (Guard::None, Action::PushWith(h)),
                c if c.is_pop() => {
                    if r.gen_bool(0.25) {
                        (Guard::None, Action::PopBottom)
                    } else {
                        (Guard::None, Action::pop_for(c, h).unwrap())
                    }
                }
                c if c.is_cint() => {
                    let neg = g.negative && (!g.positive || r.gen_bool(0.5));
                    (
                        if neg { Guard::RelNeg } else { Guard::RelPos },
                        Action::keep(c.kept_child().unwrap()),
                    )
                }
                c if c.is_bt() => (
                    if r.gen_bool(0.5) {
                        Guard::BtEq
                    } else {
                        Guard::BtNeq
                    },
                    Action::keep(c.kept_child().unwrap()),
                ),
                c => (Guard::None, Action::keep(c.kept_child().unwrap())),
            };
            a.add_rule(Rule::binary(s, q1, q2, guard, action, target));
        }
    }
    a.validate().unwrap();
    a
}

/// Input terms up to a size.
pub fn inputs(a: &Vtam, max_size: usize) -> Vec<Term> {
    vtam::enumerate_terms(a.sigma.base(), vtam::EnumBudget::size(max_size)).unwrap()
}

/// Memories up to `cap` reachable in state `q`, from derivations whose
/// memories stay below increasing bounds. The bounded sets only grow with
/// the bound, so a candidate with extra memories is given every chance
/// before input enumeration is added.
pub fn reference_memories(
    a: &Vtam,
    q: usize,
    cap: usize,
    candidate: &BTreeSet<Term>,
) -> BTreeSet<Term> {
    let mut best = BTreeSet::new();
    for k in [cap, cap + 4, cap + 8, cap + 12] {
        let Ok(b) = vtam::brute_memory_bounded(a, k) else {
            break;
        };
        best = b[q].iter().filter(|m| m.size() <= cap).cloned().collect();
        if best == *candidate {
            return best;
        }
    }
    if let Ok(more) = vtam::brute_memory(
        a,
        q,
        vtam::EnumBudget {
            max_size: 11,
            max_count: 200_000,
        },
    ) {
        best.extend(more.into_iter().filter(|m| m.size() <= cap));
    }
    best
}

/// Memory terms accepted by a TA, up to a size.
pub fn ta_set(ta: &vtam::Ta, all: &[Term]) -> BTreeSet<Term> {
    all.iter().filter(|t| ta.accepts(t)).cloned().collect()
}

/// Handcrafted automata with negative constraints. `case` picks the classes
/// of the first negative rule's partner state `r`; `variant` picks the kept
/// language and where the rule sits.
pub fn negative_instance(relation: Relation, case: vtam::NegCase, variant: usize) -> Vtam {
    use vtam::NegCase::*;
    let rel = relation.keyword();
    let partner = match (case, relation, variant % 2) {
        (Removed, _, _) => "f(r(y1), r(y2)) -> r(h(y1,y2)) ;",
        (Complemented, _, 0) => "e -> r(bot) ;",
        (Complemented, Relation::StructEq, _) => {
            "e -> t(bot) ; f(t(y1), t(y2)) -> r(h(y1,y2)) ; f(t(y1), t(y2)) -> r(k(y1,y2)) ;"
        }
        (Complemented, _, _) => "e -> t(bot) ; f(t(y1), t(y2)) -> r(h(y1,y2)) ;",
        (Unconditional, _, 0) => "e -> r(bot) ; f(q(y1), q(y2)) -> r(h(y1,y2)) ;",
        (Unconditional, _, _) => {
            "e -> t(bot) ; f(t(y1), t(y2)) -> r(h(y1,y2)) ; f(r(y1), t(y2)) -> r(k(y1,y2)) ;"
        }
    };
    let kept = match variant {
        1 => "a -> q(bot) ; b -> w(bot) ; f(q(y1), w(y2)) -> q(k(y1,y2)) ;",
        _ => "a -> q(bot) ; f(q(y1), q(y2)) -> q(h(y1,y2)) ;",
    };
    let neg = match variant {
        2 => "d(r(y1), q(y2)) -[neq]-> s(y2) ;",
        3 => "c(q(y1), r(y2)) -[neq]-> s(y1) ; p(s(h(y11,y12)), q(y2)) -> u(y11) ;",
        4 => "c(q(y1), r(y2)) -[neq]-> s(y1) ; d(r(y1), s(y2)) -[neq]-> u(y2) ;",
        _ => "c(q(y1), r(y2)) -[neq]-> s(y1) ; f(s(y1), s(y2)) -> u(h(y1,y2)) ;",
    };
    let src = format!(
        "vtam neg_{v} relation {rel}
         sigma {{ int0: a/0 b/0 e/0 ; push: f/2 ; pop11: p/2 ; cint1: c/2 ; cint2: d/2 }}
         gamma {{ h/2 k/2 }}
         states {{ q r s t u w }} final {{ s }}
         rules {{ {kept} {partner} {neg} }}",
        v = variant
    );
    let a = vtam::parse_vtam(&src).unwrap();
    a.validate().unwrap();
    a
}
