//! Determinization and Boolean closure.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use crate::error::{Error, Result};
use crate::model::{complete, Action, Category, Guard, PartitionedSignature, Relation, Rule, Vtam};
use crate::term::{Signature, SymbolDecl};

/// State of the subset construction: empty-memory flag, reachable source
/// states, and the state relation since the last push.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DetState {
    pub flag: bool,
    pub reach: BTreeSet<usize>,
    pub track: BTreeSet<(usize, usize)>,
}

impl DetState {
    /// `d<flag>_<reach>_<track>` with `x` between elements, `iyj` for pairs
    /// and `e` for an empty set.
    pub fn name(&self) -> String {
        let reach = if self.reach.is_empty() {
            "e".to_string()
        } else {
            self.reach
                .iter()
                .map(|q| q.to_string())
                .collect::<Vec<_>>()
                .join("x")
        };
        let track = if self.track.is_empty() {
            "e".to_string()
        } else {
            self.track
                .iter()
                .map(|(a, b)| format!("{a}y{b}"))
                .collect::<Vec<_>>()
                .join("x")
        };
        format!("d{}_{}_{}", u8::from(self.flag), reach, track)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum DetTop {
    Bot,
    Sym(usize),
}

/// What a det memory symbol was pushed by.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum DetMem {
    Pair(usize, usize, usize),
    Const(usize),
}

struct Source<'a> {
    a: &'a Vtam,
    n: usize,
    by_sym: Vec<Vec<&'a Rule>>,
}

impl<'a> Source<'a> {
    fn new(a: &'a Vtam) -> Source<'a> {
        let mut by_sym = vec![Vec::new(); a.sigma.len()];
        for r in &a.rules {
            by_sym[r.symbol].push(r);
        }
        Source {
            a,
            n: a.states.len(),
            by_sym,
        }
    }

    fn id(&self) -> BTreeSet<(usize, usize)> {
        (0..self.n).map(|q| (q, q)).collect()
    }
}

struct Det<'a> {
    src: Source<'a>,
    out: Vtam,
    states: Vec<DetState>,
    state_ids: HashMap<DetState, usize>,
    mems: Vec<DetMem>,
    mem_ids: HashMap<DetMem, usize>,
    tops: Vec<BTreeSet<DetTop>>,
    under: HashMap<(usize, usize), BTreeSet<DetTop>>,
    done: HashSet<(usize, usize, usize, Option<DetTop>)>,
    flows: Vec<Flow>,
    changed: bool,
}

/// How memory tops move between det states.
#[derive(Debug, Clone, Copy)]
enum Flow {
    /// Kept memory: tops of the source state reach the target.
    Copy(usize, usize),
    /// After popping `h`, tops found under component `comp` reach the target.
    Below(usize, usize, usize),
    /// A child state's tops end up under component `side` of `h`.
    Under(usize, usize, usize),
}

/// Deterministic automaton with the same language. Only det states and
/// memory symbols reachable from leaves are built; det states with no
/// reachable source state are dropped.
pub fn determinize(a: &Vtam) -> Result<Vtam> {
    a.validate()?;
    if a.relation == Relation::SynEq {
        return Err(Error::Unsupported(
            "determinization is only available for relations none and struct, not syntactic equality".into(),
        ));
    }
    let mut d = Det {
        src: Source::new(a),
        out: Vtam::new(
            format!("{}_det", a.name),
            a.sigma.clone(),
            Signature::default(),
            a.relation,
        ),
        states: Vec::new(),
        state_ids: HashMap::new(),
        mems: Vec::new(),
        mem_ids: HashMap::new(),
        tops: Vec::new(),
        under: HashMap::new(),
        done: HashSet::new(),
        flows: Vec::new(),
        changed: false,
    };
    d.leaves();
    loop {
        d.changed = false;
        d.binaries();
        if !d.changed {
            break;
        }
    }
    for (i, s) in d.states.iter().enumerate() {
        if s.reach.iter().any(|q| a.is_final(*q)) {
            d.out.finals.insert(i);
        }
    }
    Ok(d.out)
}

impl<'a> Det<'a> {
    fn intern_state(&mut self, s: DetState) -> usize {
        if let Some(&i) = self.state_ids.get(&s) {
            return i;
        }
        let i = self.out.add_state(s.name());
        self.states.push(s.clone());
        self.state_ids.insert(s, i);
        self.tops.push(BTreeSet::new());
        self.changed = true;
        i
    }

    fn intern_mem(&mut self, m: DetMem) -> usize {
        if let Some(&i) = self.mem_ids.get(&m) {
            return i;
        }
        let a = self.src.a;
        let (base, arity) = match &m {
            DetMem::Pair(d1, d2, f) => (
                format!(
                    "p_{}_{}_{}",
                    self.out.states[*d1],
                    self.out.states[*d2],
                    a.sigma.name(*f)
                ),
                2,
            ),
            DetMem::Const(c) => (format!("p_{}", a.sigma.name(*c)), 0),
        };
        let name = self.out.gamma.fresh_name(&base);
        let i = self
            .out
            .gamma
            .add(SymbolDecl::new(name, arity))
            .expect("fresh memory symbol");
        self.mems.push(m.clone());
        self.mem_ids.insert(m, i);
        i
    }

    fn add_top(&mut self, d: usize, t: DetTop) {
        if self.tops[d].insert(t) {
            self.changed = true;
        }
    }

    fn emit(&mut self, rule: Rule) {
        let before = self.out.rules.len();
        self.out.add_rule(rule);
        if self.out.rules.len() != before {
            self.changed = true;
        }
    }

    fn leaves(&mut self) {
        let a = self.src.a;
        for (f, _, arity, cat) in a.sigma.iter() {
            if arity != 0 {
                continue;
            }
            let reach: BTreeSet<usize> = self.src.by_sym[f].iter().map(|r| r.target).collect();
            if reach.is_empty() {
                continue;
            }
            let flag = cat == Category::Push;
            let d = self.intern_state(DetState {
                flag,
                reach,
                track: self.src.id(),
            });
            let (action, top) = if flag {
                let m = self.intern_mem(DetMem::Const(f));
                (Action::PushConst(m), DetTop::Sym(m))
            } else {
                (Action::EmitBot, DetTop::Bot)
            };
            self.add_top(d, top);
            self.emit(Rule::constant(f, action, d));
        }
    }

    fn binaries(&mut self) {
        let a = self.src.a;
        let n = self.states.len();
        for (f, _, arity, cat) in a.sigma.iter() {
            if arity != 2 {
                continue;
            }
            for d1 in 0..n {
                for d2 in 0..n {
                    if cat.is_pop() {
                        let popped = if cat.popped_child() == Some(0) {
                            d1
                        } else {
                            d2
                        };
                        let tops: Vec<DetTop> = self.tops[popped].iter().copied().collect();
                        for top in tops {
                            if self.done.insert((f, d1, d2, Some(top))) {
                                self.pop(f, cat, d1, d2, top);
                            }
                        }
                    } else {
                        if !self.done.insert((f, d1, d2, None)) {
                            continue;
                        }
                        match cat {
                            Category::Push => self.push(f, d1, d2),
                            c if c.is_cint() || c.is_bt() => {
                                let pos = if c.is_cint() {
                                    Guard::RelPos
                                } else {
                                    Guard::BtEq
                                };
                                self.keep(f, c, d1, d2, pos);
                                self.keep(f, c, d1, d2, pos.negated());
                            }
                            c => self.keep(f, c, d1, d2, Guard::None),
                        }
                    }
                }
            }
        }
        self.flow_tops();
    }

    /// Pushes top sets along recorded flows until nothing changes.
    fn flow_tops(&mut self) {
        loop {
            let mut grew = false;
            for k in 0..self.flows.len() {
                let (from, to): (Vec<DetTop>, _) = match self.flows[k] {
                    Flow::Copy(src, dst) => (self.tops[src].iter().copied().collect(), Some(dst)),
                    Flow::Below(h, comp, dst) => (
                        self.under
                            .get(&(h, comp))
                            .into_iter()
                            .flatten()
                            .copied()
                            .collect(),
                        Some(dst),
                    ),
                    Flow::Under(child, h, side) => {
                        let ts: Vec<DetTop> = self.tops[child].iter().copied().collect();
                        let e = self.under.entry((h, side)).or_default();
                        for t in ts {
                            grew |= e.insert(t);
                        }
                        (Vec::new(), None)
                    }
                };
                if let Some(dst) = to {
                    for t in from {
                        grew |= self.tops[dst].insert(t);
                    }
                }
            }
            if !grew {
                return;
            }
            self.changed = true;
        }
    }

    fn push(&mut self, f: usize, d1: usize, d2: usize) {
        let (r1, r2) = (self.states[d1].reach.clone(), self.states[d2].reach.clone());
        let reach: BTreeSet<usize> = self.src.by_sym[f]
            .iter()
            .filter(|r| r1.contains(&r.left[0]) && r2.contains(&r.left[1]))
            .map(|r| r.target)
            .collect();
        if reach.is_empty() {
            return;
        }
        let d = self.intern_state(DetState {
            flag: true,
            reach,
            track: self.src.id(),
        });
        let m = self.intern_mem(DetMem::Pair(d1, d2, f));
        self.flows.push(Flow::Under(d1, m, 0));
        self.flows.push(Flow::Under(d2, m, 1));
        self.add_top(d, DetTop::Sym(m));
        self.emit(Rule::binary(f, d1, d2, Guard::None, Action::PushWith(m), d));
    }

    /// INT, CINT and BT rules.
    fn keep(&mut self, f: usize, cat: Category, d1: usize, d2: usize, guard: Guard) {
        let k = cat.kept_child().expect("keeping category");
        let rules: Vec<&Rule> = self.src.by_sym[f]
            .iter()
            .copied()
            .filter(|r| r.guard == guard)
            .collect();
        let Some((reach, track)) = self.keep_sets(&rules, d1, d2, k) else {
            return;
        };
        let flag = self.states[if k == 0 { d1 } else { d2 }].flag;
        let d = self.intern_state(DetState { flag, reach, track });
        self.flows.push(Flow::Copy(if k == 0 { d1 } else { d2 }, d));
        self.emit(Rule::binary(f, d1, d2, guard, Action::keep(k), d));
    }

    /// Reach and track through rules that leave child `k`'s memory in place.
    fn keep_sets(
        &self,
        rules: &[&Rule],
        d1: usize,
        d2: usize,
        k: usize,
    ) -> Option<(BTreeSet<usize>, BTreeSet<(usize, usize)>)> {
        let (s1, s2) = (&self.states[d1], &self.states[d2]);
        let reach: BTreeSet<usize> = rules
            .iter()
            .filter(|r| s1.reach.contains(&r.left[0]) && s2.reach.contains(&r.left[1]))
            .map(|r| r.target)
            .collect();
        if reach.is_empty() {
            return None;
        }
        let (kept, other) = if k == 0 { (s1, s2) } else { (s2, s1) };
        let mut by_kept: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for r in rules {
            if other.reach.contains(&r.left[1 - k]) {
                by_kept.entry(r.left[k]).or_default().push(r.target);
            }
        }
        let mut track = BTreeSet::new();
        for &(q, qk) in &kept.track {
            for &t in by_kept.get(&qk).into_iter().flatten() {
                track.insert((q, t));
            }
        }
        Some((reach, track))
    }

    fn pop(&mut self, f: usize, cat: Category, d1: usize, d2: usize, top: DetTop) {
        let popped = cat.popped_child().expect("pop category");
        match top {
            DetTop::Bot => {
                let rules: Vec<&Rule> = self.src.by_sym[f]
                    .iter()
                    .copied()
                    .filter(|r| r.action == Action::PopBottom)
                    .collect();
                let Some((reach, track)) = self.keep_sets(&rules, d1, d2, popped) else {
                    return;
                };
                let d = self.intern_state(DetState {
                    flag: false,
                    reach,
                    track,
                });
                self.add_top(d, DetTop::Bot);
                self.emit(Rule::binary(f, d1, d2, Guard::None, Action::PopBottom, d));
            }
            DetTop::Sym(h) => {
                let DetMem::Pair(e1, e2, g) = self.mems[h].clone() else {
                    return;
                };
                let comp = usize::from(matches!(cat, Category::Pop12 | Category::Pop22));
                let (ep1, ep2) = (self.states[e1].clone(), self.states[e2].clone());
                let (taken, fixed) = if comp == 0 {
                    (&ep1, &ep2)
                } else {
                    (&ep2, &ep1)
                };
                let (sp, so) = if popped == 0 {
                    (&self.states[d1], &self.states[d2])
                } else {
                    (&self.states[d2], &self.states[d1])
                };
                // (state at the push, pushed symbol) for a given set of taken-side states.
                let pushes = |taken_states: &BTreeSet<usize>| -> BTreeSet<(usize, usize)> {
                    self.src.by_sym[g]
                        .iter()
                        .filter(|r| {
                            let (lt, lf) = if comp == 0 {
                                (r.left[0], r.left[1])
                            } else {
                                (r.left[1], r.left[0])
                            };
                            taken_states.contains(&lt) && fixed.reach.contains(&lf)
                        })
                        .filter_map(|r| match r.action {
                            Action::PushWith(hh) => Some((r.target, hh)),
                            _ => None,
                        })
                        .collect()
                };
                let finish = |p0: &BTreeSet<(usize, usize)>| -> BTreeSet<usize> {
                    let mut out = BTreeSet::new();
                    for &(q0, hh) in p0 {
                        for &(a0, q1) in &sp.track {
                            if a0 != q0 {
                                continue;
                            }
                            for r in &self.src.by_sym[f] {
                                if r.left[popped] == q1
                                    && so.reach.contains(&r.left[1 - popped])
                                    && r.action.popped_symbol() == Some(hh)
                                {
                                    out.insert(r.target);
                                }
                            }
                        }
                    }
                    out
                };
                let reach = finish(&pushes(&taken.reach));
                if reach.is_empty() {
                    return;
                }
                let mut track = BTreeSet::new();
                for q in 0..self.src.n {
                    let img: BTreeSet<usize> = taken
                        .track
                        .iter()
                        .filter(|p| p.0 == q)
                        .map(|p| p.1)
                        .collect();
                    if img.is_empty() {
                        continue;
                    }
                    for t in finish(&pushes(&img)) {
                        track.insert((q, t));
                    }
                }
                let d = self.intern_state(DetState {
                    flag: taken.flag,
                    reach,
                    track,
                });
                self.flows.push(Flow::Below(h, comp, d));
                let action = Action::pop_for(cat, h).expect("pop category");
                self.emit(Rule::binary(f, d1, d2, Guard::None, action, d));
            }
        }
    }
}

fn same_partition(a1: &Vtam, a2: &Vtam) -> Result<Vec<usize>> {
    let mut map = Vec::with_capacity(a2.sigma.len());
    if a1.sigma.len() != a2.sigma.len() {
        return Err(Error::Incompatible(
            "input signatures differ in size".into(),
        ));
    }
    for (_, name, arity, cat) in a2.sigma.iter() {
        match a1.sigma.index_of(name) {
            Some(i) if a1.sigma.arity(i) == arity && a1.sigma.category(i) == cat => map.push(i),
            _ => {
                return Err(Error::Incompatible(format!(
                    "symbol `{name}` is not declared identically in both automata"
                )))
            }
        }
    }
    Ok(map)
}

fn combined_relation(a1: &Vtam, a2: &Vtam) -> Result<Relation> {
    match (a1.relation, a2.relation) {
        (x, y) if x == y => Ok(x),
        (Relation::None, y) => Ok(y),
        (x, Relation::None) => Ok(x),
        (x, y) => Err(Error::Incompatible(format!(
            "relations {} and {} differ",
            x.keyword(),
            y.keyword()
        ))),
    }
}

/// Disjoint union of states, rules and memory symbols.
pub fn union(a1: &Vtam, a2: &Vtam) -> Result<Vtam> {
    a1.validate()?;
    a2.validate()?;
    let sym = same_partition(a1, a2)?;
    let relation = combined_relation(a1, a2)?;
    let mut out = a1.clone();
    out.name = format!("{}_or_{}", a1.name, a2.name);
    out.relation = relation;
    let mut gmap = Vec::new();
    for d in a2.gamma.decls() {
        match out.gamma.index_of(&d.name) {
            Some(i) if out.gamma.decls()[i].arity == d.arity => gmap.push(i),
            _ => {
                let name = out.gamma.fresh_name(&d.name);
                gmap.push(out.gamma.add(SymbolDecl::new(name, d.arity))?);
            }
        }
    }
    let smap: Vec<usize> = a2.states.iter().map(|s| out.add_fresh_state(s)).collect();
    for &q in &a2.finals {
        out.finals.insert(smap[q]);
    }
    for r in &a2.rules {
        out.add_rule(Rule {
            symbol: sym[r.symbol],
            left: r.left.iter().map(|&q| smap[q]).collect(),
            guard: r.guard,
            action: map_action(r.action, &gmap),
            target: smap[r.target],
        });
    }
    Ok(out)
}

fn map_action(a: Action, g: &[usize]) -> Action {
    match a {
        Action::PushWith(h) => Action::PushWith(g[h]),
        Action::PushConst(c) => Action::PushConst(g[c]),
        Action::PopLeftOfLeft(h) => Action::PopLeftOfLeft(g[h]),
        Action::PopRightOfLeft(h) => Action::PopRightOfLeft(g[h]),
        Action::PopLeftOfRight(h) => Action::PopLeftOfRight(g[h]),
        Action::PopRightOfRight(h) => Action::PopRightOfRight(g[h]),
        other => other,
    }
}

/// Product automaton over reachable state pairs.
pub fn intersection(a1: &Vtam, a2: &Vtam) -> Result<Vtam> {
    a1.validate()?;
    a2.validate()?;
    let sym = same_partition(a1, a2)?;
    let relation = combined_relation(a1, a2)?;
    if relation == Relation::SynEq
        && (a1.has_guard(|g| g == Guard::RelNeg) || a2.has_guard(|g| g == Guard::RelNeg))
    {
        return Err(Error::Unsupported(
            "product of negative syntactic-equality constraints is not expressible as a constraint on pairs".into(),
        ));
    }
    let mut out = Vtam::new(
        format!("{}_and_{}", a1.name, a2.name),
        a1.sigma.clone(),
        Signature::default(),
        relation,
    );
    let mut by_sym2: Vec<Vec<&Rule>> = vec![Vec::new(); a1.sigma.len()];
    for r in &a2.rules {
        by_sym2[sym[r.symbol]].push(r);
    }
    let mut mems: HashMap<(usize, usize), usize> = HashMap::new();
    let mut mem = |out: &mut Vtam, h1: usize, h2: usize| -> usize {
        *mems.entry((h1, h2)).or_insert_with(|| {
            let base = format!("p_{}_{}", a1.gamma.name(h1), a2.gamma.name(h2));
            let name = out.gamma.fresh_name(&base);
            out.gamma
                .add(SymbolDecl::new(name, a1.gamma.decls()[h1].arity))
                .expect("fresh")
        })
    };
    type PairRule = (usize, Vec<(usize, usize)>, Guard, Action, (usize, usize));
    let mut reach: BTreeSet<(usize, usize)> = BTreeSet::new();
    let mut rules: Vec<PairRule> = Vec::new();
    let mut seen: HashSet<(usize, usize)> = HashSet::new();
    loop {
        let mut changed = false;
        for (i1, r1) in a1.rules.iter().enumerate() {
            for (i2, r2) in by_sym2[r1.symbol].iter().enumerate() {
                if seen.contains(&(i1, i2)) || r1.guard != r2.guard {
                    continue;
                }
                let left: Vec<(usize, usize)> = r1
                    .left
                    .iter()
                    .copied()
                    .zip(r2.left.iter().copied())
                    .collect();
                if !left.iter().all(|p| reach.contains(p)) {
                    continue;
                }
                seen.insert((i1, i2));
                let action = match (r1.action, r2.action) {
                    (Action::PushWith(h1), Action::PushWith(h2)) => {
                        Action::PushWith(mem(&mut out, h1, h2))
                    }
                    (Action::PushConst(c1), Action::PushConst(c2)) => {
                        Action::PushConst(mem(&mut out, c1, c2))
                    }
                    (Action::EmitBot, Action::EmitBot) => Action::EmitBot,
                    (Action::PopBottom, Action::PopBottom) => Action::PopBottom,
                    (Action::KeepLeft, Action::KeepLeft) => Action::KeepLeft,
                    (Action::KeepRight, Action::KeepRight) => Action::KeepRight,
                    (x, y) => match (x.popped_symbol(), y.popped_symbol()) {
                        (Some(h1), Some(h2)) => {
                            let h = mem(&mut out, h1, h2);
                            Action::pop_for(a1.sigma.category(r1.symbol), h).expect("pop")
                        }
                        _ => continue,
                    },
                };
                let target = (r1.target, r2.target);
                changed |= reach.insert(target);
                rules.push((r1.symbol, left, r1.guard, action, target));
            }
        }
        if !changed {
            break;
        }
    }
    let mut ids: HashMap<(usize, usize), usize> = HashMap::new();
    let mut names: HashSet<String> = HashSet::new();
    for &(q1, q2) in &reach {
        let base = format!("{}_{}", a1.states[q1], a2.states[q2]);
        let mut name = base.clone();
        let mut i = 1;
        while names.contains(&name) {
            name = format!("{base}_{i}");
            i += 1;
        }
        names.insert(name.clone());
        let id = out.add_state(name);
        ids.insert((q1, q2), id);
        if a1.is_final(q1) && a2.is_final(q2) {
            out.finals.insert(id);
        }
    }
    for (symbol, left, guard, action, target) in rules {
        out.add_rule(Rule {
            symbol,
            left: left.iter().map(|p| ids[p]).collect(),
            guard,
            action,
            target: ids[&target],
        });
    }
    Ok(out)
}

/// Determinize, complete, flip final states. The result is exact on every
/// term whose memory shape is not stuck; stuck terms have no run in any
/// automaton over the same partition.
pub fn complement(a: &Vtam) -> Result<Vtam> {
    if a.relation == Relation::SynEq {
        return Err(Error::Unsupported(
            "automata with syntactic equality constraints are not effectively closed under complement".into(),
        ));
    }
    // Deterministic inputs (complements among them) skip the subset build.
    let d = if a.is_deterministic() {
        complete(a)?
    } else {
        complete(&determinize(a)?)?
    };
    let mut c = d.clone();
    c.name = format!("{}_not", a.name);
    c.finals = (0..d.states.len())
        .filter(|q| !d.finals.contains(q))
        .collect();
    Ok(c)
}

/// Automaton with no rules over the given partition.
pub fn empty_automaton(sigma: &PartitionedSignature, relation: Relation) -> Vtam {
    Vtam::new("empty", sigma.clone(), Signature::default(), relation)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::format::parse_vtam;
    use crate::term::parse_term_free;

    const NONDET_POP: &str = "vtam np relation none
sigma { int0: a/0 ; push: f/2 ; pop11: p/2 }
gamma { h/2 k/2 }
states { q r s t }
final { t }
rules {
  a -> q(bot) ;
  f(q(y1), q(y2)) -> r(h(y1,y2)) ;
  f(q(y1), q(y2)) -> s(k(y1,y2)) ;
  p(r(h(y11,y12)), q(y2)) -> t(y11) ;
  p(s(k(y11,y12)), q(y2)) -> q(y11) ;
  p(q(bot), q(y2)) -> q(bot) ;
}";

    #[test]
    fn det_agrees_on_small_terms() {
        let a = parse_vtam(NONDET_POP).unwrap();
        let d = determinize(&a).unwrap();
        d.validate().unwrap();
        assert!(d.is_deterministic());
        for s in [
            "a",
            "p(f(a,a),a)",
            "p(p(f(a,a),a),a)",
            "p(a,a)",
            "f(a,a)",
            "p(f(p(f(a,a),a),a),a)",
        ] {
            let t = parse_term_free(s).unwrap();
            assert_eq!(
                d.accepts_by_runs(&t).unwrap(),
                a.accepts_by_runs(&t).unwrap(),
                "{s}"
            );
        }
    }

    #[test]
    fn det_names_are_canonical() {
        let s = DetState {
            flag: true,
            reach: [0, 2].into(),
            track: [(0, 0), (1, 2)].into(),
        };
        assert_eq!(s.name(), "d1_0x2_0y0x1y2");
        let e = DetState {
            flag: false,
            reach: BTreeSet::new(),
            track: BTreeSet::new(),
        };
        assert_eq!(e.name(), "d0_e_e");
    }

    #[test]
    fn syn_eq_rejected() {
        let src = "vtam s relation syn sigma { int0: a/0 ; cint1: c/2 } gamma { } states { q } final { q }
                   rules { a -> q(bot) ; c(q(y1), q(y2)) -[eq]-> q(y1) ; }";
        let a = parse_vtam(src).unwrap();
        assert!(matches!(determinize(&a), Err(Error::Unsupported(_))));
        assert!(matches!(complement(&a), Err(Error::Unsupported(_))));
    }

    #[test]
    fn opposite_signs_give_no_product_rule() {
        let pos = "vtam p relation struct sigma { int0: a/0 ; cint1: c/2 } gamma { } states { q } final { q }
                   rules { a -> q(bot) ; c(q(y1), q(y2)) -[eq]-> q(y1) ; }";
        let neg = pos.replace("-[eq]->", "-[neq]->");
        let i = intersection(&parse_vtam(pos).unwrap(), &parse_vtam(&neg).unwrap()).unwrap();
        let c = i.symbol_index("c").unwrap();
        assert!(i.rules.iter().all(|r| r.symbol != c));
    }

    #[test]
    fn union_size_is_additive() {
        let a = parse_vtam(NONDET_POP).unwrap();
        let u = union(&a, &a).unwrap();
        assert_eq!(u.states.len(), 2 * a.states.len());
        u.validate().unwrap();
    }
}
