//! Horn-clause saturation computing the memory language of every state as a
//! plain tree automaton.
//!
//! A predicate `Q_q(m)` holds when `m` is a memory reachable in state `q`.
//! Rules become clauses over one or two memory variables; bodies are kept
//! as sets of atoms on a single variable. Relation literals are removed at
//! translation time with the chain shortcut: `R(y, z), Q(z)` becomes the
//! split atom `{Q}^R(y)`. Variables that disappear from a head are split
//! into propositional atoms `N_S` ("some memory satisfies every atom of
//! `S`"); a clause whose propositional body is not yet known to hold waits.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet, VecDeque};
use std::fmt;

use crate::error::{Error, Result};
use crate::model::{Action, Category, Guard, Relation, Vtam};
use crate::ta::Ta;
use crate::term::{Signature, Term, BOT};

/// Predicate applied to one memory variable.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Atom {
    State(usize),
    /// `X^R(y)`: some memory related to `y` satisfies every `Q_p`, `p ∈ X`.
    Split(BTreeSet<usize>),
}

pub type AtomSet = BTreeSet<Atom>;

/// `(C_states ∪ C_splits)^R = C_states^R ∧ C_splits` and `∅^R` is true.
fn close_under_relation(c: &AtomSet) -> AtomSet {
    let states: BTreeSet<usize> = c
        .iter()
        .filter_map(|a| match a {
            Atom::State(q) => Some(*q),
            Atom::Split(_) => None,
        })
        .collect();
    let mut out: AtomSet = c
        .iter()
        .filter(|a| matches!(a, Atom::Split(_)))
        .cloned()
        .collect();
    if !states.is_empty() {
        out.insert(Atom::Split(states));
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum Body {
    /// `head(c)`.
    Fact { c: usize },
    /// `L(y1), R(y2) => head(h(y1,y2))`.
    Push {
        h: usize,
        left: AtomSet,
        right: AtomSet,
    },
    /// `B(y) => head(y)`.
    Inter { body: AtomSet },
    /// `Q_state(h(y1,y2)) => head(y_taken)`, or `Q_state(bot) => head(bot)`.
    Pop {
        h: Option<usize>,
        taken: usize,
        state: usize,
    },
    /// `=> N_S`, recorded when a propositional atom is proven.
    Prop,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct Item {
    props: BTreeSet<AtomSet>,
    body: Body,
    head: Atom,
    tag: &'static str,
}

/// Inference order over the worklist.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Order {
    Fifo,
    Lifo,
}

#[derive(Debug, Clone, Copy)]
pub struct SaturationOptions {
    pub order: Order,
    pub max_steps: usize,
}

impl Default for SaturationOptions {
    fn default() -> SaturationOptions {
        SaturationOptions {
            order: Order::Fifo,
            max_steps: 5_000_000,
        }
    }
}

/// The saturated clause set.
pub struct Saturated {
    names: Vec<String>,
    gamma: Signature,
    binaries: Vec<usize>,
    constants: Vec<usize>,
    facts: HashMap<usize, BTreeSet<Atom>>,
    pushes: Vec<(usize, AtomSet, AtomSet, Atom)>,
    inters: Vec<(AtomSet, Atom)>,
    retained: Vec<Item>,
    known: HashSet<AtomSet>,
    steps: usize,
}

struct Engine {
    gamma: Signature,
    bot: usize,
    binaries: Vec<usize>,
    constants: Vec<usize>,
    relation: Relation,
    opts: SaturationOptions,
    queue: VecDeque<Item>,
    waiting: Vec<Item>,
    known: HashSet<AtomSet>,
    facts: HashMap<usize, BTreeSet<Atom>>,
    facts_by_head: HashMap<Atom, BTreeSet<usize>>,
    pushes: Vec<(usize, AtomSet, AtomSet, Atom)>,
    push_ix: HashMap<(usize, Atom), Vec<usize>>,
    inters: Vec<(AtomSet, Atom)>,
    inter_seen: HashSet<(AtomSet, Atom)>,
    inter_by_atom: HashMap<Atom, Vec<usize>>,
    pops: Vec<(Option<usize>, usize, usize, Atom)>,
    pop_ix: HashMap<(Option<usize>, usize), Vec<usize>>,
    splits: BTreeSet<BTreeSet<usize>>,
    retained: Vec<Item>,
    steps: usize,
}

/// Initial clauses, one per rule.
fn rule_items(a: &Vtam) -> Result<Vec<Item>> {
    if a.has_bt() {
        return Err(Error::Unsupported(
            "input-term (brother) constraints have no clause translation".into(),
        ));
    }
    let gamma = a.gamma.with_bot();
    let bot = gamma.index_of(BOT).expect("bot");
    let st = |q: usize| Atom::State(q);
    let single = |q: usize| -> AtomSet { [Atom::State(q)].into_iter().collect() };
    let mut out = Vec::new();
    for r in &a.rules {
        let head = st(r.target);
        let cat = a.sigma.category(r.symbol);
        let item = match (r.action, r.guard) {
            (_, Guard::RelNeg) => {
                return Err(Error::Unsupported(format!(
                    "negative constraint in `{}`; eliminate negative constraints first",
                    a.show_rule(r)
                )))
            }
            (Action::EmitBot, _) => Item {
                props: BTreeSet::new(),
                body: Body::Fact { c: bot },
                head,
                tag: "(4)",
            },
            (Action::PushConst(c), _) => Item {
                props: BTreeSet::new(),
                body: Body::Fact { c },
                head,
                tag: "(4)",
            },
            (Action::PushWith(h), _) => Item {
                props: BTreeSet::new(),
                body: Body::Push {
                    h,
                    left: single(r.left[0]),
                    right: single(r.left[1]),
                },
                head,
                tag: "(1)",
            },
            (Action::KeepLeft | Action::KeepRight, g) => {
                let k = usize::from(r.action == Action::KeepRight);
                let (kept, other) = (r.left[k], r.left[1 - k]);
                let mut body = single(kept);
                let mut props = BTreeSet::new();
                if g == Guard::RelPos {
                    match a.relation {
                        Relation::SynEq => {
                            body.insert(st(other));
                        }
                        Relation::StructEq => {
                            body.insert(Atom::Split([other].into_iter().collect()));
                        }
                        Relation::None => {
                            return Err(Error::Invalid(
                                vec!["constraint without a relation".into()],
                            ))
                        }
                    }
                } else {
                    props.insert(single(other));
                }
                Item {
                    props,
                    body: Body::Inter { body },
                    head,
                    tag: if g == Guard::RelPos { "(2b)" } else { "(2)" },
                }
            }
            (Action::PopBottom, _) => {
                let p = cat.popped_child().expect("pop");
                Item {
                    props: [single(r.left[1 - p])].into_iter().collect(),
                    body: Body::Pop {
                        h: None,
                        taken: 0,
                        state: r.left[p],
                    },
                    head,
                    tag: "(3)",
                }
            }
            (act, _) => {
                let p = cat.popped_child().expect("pop");
                Item {
                    props: [single(r.left[1 - p])].into_iter().collect(),
                    body: Body::Pop {
                        h: act.popped_symbol(),
                        taken: act.taken_component().unwrap(),
                        state: r.left[p],
                    },
                    head,
                    tag: "(3)",
                }
            }
        };
        out.push(item);
    }
    Ok(out)
}

/// Saturates the clause translation of `a`. Negative and BT constraints are rejected.
pub fn saturate(a: &Vtam, opts: SaturationOptions) -> Result<Saturated> {
    let items = rule_items(a)?;
    let gamma = a.gamma.with_bot();
    let bot = gamma.index_of(BOT).expect("bot");
    let binaries = (0..gamma.len())
        .filter(|&i| gamma.decls()[i].arity == 2)
        .collect();
    let constants = (0..gamma.len())
        .filter(|&i| gamma.decls()[i].arity == 0)
        .collect();
    let mut e = Engine {
        gamma,
        bot,
        binaries,
        constants,
        relation: a.relation,
        opts,
        queue: items.into_iter().collect(),
        waiting: Vec::new(),
        known: HashSet::new(),
        facts: HashMap::new(),
        facts_by_head: HashMap::new(),
        pushes: Vec::new(),
        push_ix: HashMap::new(),
        inters: Vec::new(),
        inter_seen: HashSet::new(),
        inter_by_atom: HashMap::new(),
        pops: Vec::new(),
        pop_ix: HashMap::new(),
        splits: BTreeSet::new(),
        retained: Vec::new(),
        steps: 0,
    };
    e.known.insert(AtomSet::new());
    loop {
        e.drain()?;
        let needed: BTreeSet<AtomSet> = e
            .waiting
            .iter()
            .flat_map(|i| i.props.iter().cloned())
            .collect();
        let mut nonempty = Nonempty::new(&e.facts, &e.pushes, &e.binaries);
        let mut progress = false;
        for s in needed {
            if !e.known.contains(&s) && nonempty.holds(&s) {
                let props = [s.clone()].into_iter().collect();
                e.retained.push(Item {
                    props,
                    body: Body::Prop,
                    head: Atom::State(0),
                    tag: "Propositional",
                });
                e.known.insert(s);
                progress = true;
            }
        }
        if !progress {
            break;
        }
        let (ready, still): (Vec<Item>, Vec<Item>) = std::mem::take(&mut e.waiting)
            .into_iter()
            .partition(|i| i.props.iter().all(|p| e.known.contains(p)));
        e.waiting = still;
        e.queue.extend(ready);
    }
    Ok(Saturated {
        names: a.states.clone(),
        gamma: e.gamma,
        binaries: e.binaries,
        constants: e.constants,
        facts: e.facts,
        pushes: e.pushes,
        inters: e.inters,
        retained: e.retained,
        known: e.known,
        steps: e.steps,
    })
}

impl Engine {
    fn drain(&mut self) -> Result<()> {
        loop {
            let next = match self.opts.order {
                Order::Fifo => self.queue.pop_front(),
                Order::Lifo => self.queue.pop_back(),
            };
            let Some(item) = next else { return Ok(()) };
            self.steps += 1;
            if self.steps > self.opts.max_steps {
                return Err(Error::Budget(format!(
                    "saturation exceeded {} steps",
                    self.opts.max_steps
                )));
            }
            if !item.props.iter().all(|p| self.known.contains(p)) {
                self.waiting.push(item);
                continue;
            }
            self.activate(item)?;
        }
    }

    fn derive(&mut self, body: Body, head: Atom, props: BTreeSet<AtomSet>, tag: &'static str) {
        let props = props.into_iter().filter(|p| !p.is_empty()).collect();
        self.queue.push_back(Item {
            props,
            body,
            head,
            tag,
        });
    }

    fn register_atoms(&mut self, set: &AtomSet) {
        for a in set {
            if let Atom::Split(x) = a {
                if self.splits.insert(x.clone()) {
                    self.define_split(x.clone());
                }
            }
        }
    }

    fn activate(&mut self, item: Item) -> Result<()> {
        let head = item.head.clone();
        match item.body.clone() {
            Body::Fact { c } => {
                if !self.facts.entry(c).or_default().insert(head.clone()) {
                    return Ok(());
                }
                self.facts_by_head
                    .entry(head.clone())
                    .or_default()
                    .insert(c);
                self.retained.push(item);
                self.on_fact(c, head);
            }
            Body::Push { h, left, right } => {
                let key = (h, head.clone());
                let subsumed = self.push_ix.get(&key).into_iter().flatten().any(|&i| {
                    let p = &self.pushes[i];
                    p.1.is_subset(&left) && p.2.is_subset(&right)
                });
                if subsumed {
                    return Ok(());
                }
                self.register_atoms(&left);
                self.register_atoms(&right);
                let idx = self.pushes.len();
                self.pushes.push((h, left, right, head.clone()));
                self.push_ix.entry(key).or_default().push(idx);
                self.retained.push(item);
                self.on_push(idx);
            }
            Body::Inter { body } => {
                let subsumed = self
                    .inters
                    .iter()
                    .any(|(b, hd)| *hd == head && b.is_subset(&body));
                if subsumed || !self.inter_seen.insert((body.clone(), head.clone())) {
                    return Ok(());
                }
                self.register_atoms(&body);
                let idx = self.inters.len();
                self.inters.push((body.clone(), head));
                for a in &body {
                    self.inter_by_atom.entry(a.clone()).or_default().push(idx);
                }
                self.retained.push(item);
                self.on_inter(idx);
            }
            Body::Prop => {}
            Body::Pop { h, taken, state } => {
                let idx = self.pops.len();
                self.pops.push((h, taken, state, head));
                self.pop_ix.entry((h, state)).or_default().push(idx);
                self.retained.push(item);
                self.on_pop(idx);
            }
        }
        Ok(())
    }

    fn on_fact(&mut self, c: usize, head: Atom) {
        // Intermediate clauses at the constant.
        let inters: Vec<usize> = self.inter_by_atom.get(&head).cloned().unwrap_or_default();
        for i in inters {
            let (body, h2) = self.inters[i].clone();
            if body
                .iter()
                .all(|a| self.facts.get(&c).is_some_and(|s| s.contains(a)))
            {
                self.derive(Body::Fact { c }, h2, BTreeSet::new(), "Push");
            }
        }
        if c == self.bot {
            if let Atom::State(q) = head {
                let pops: Vec<usize> = self.pop_ix.get(&(None, q)).cloned().unwrap_or_default();
                for p in pops {
                    let h2 = self.pops[p].3.clone();
                    self.derive(Body::Fact { c }, h2, BTreeSet::new(), "Push");
                }
            }
        }
        if let Atom::State(q) = head {
            let xs: Vec<BTreeSet<usize>> = self
                .splits
                .iter()
                .filter(|x| x.contains(&q))
                .cloned()
                .collect();
            for x in xs {
                self.split_constant(&x, c);
            }
        }
    }

    fn split_constant(&mut self, x: &BTreeSet<usize>, b: usize) {
        let at = self.facts.get(&b);
        if x.iter()
            .all(|p| at.is_some_and(|s| s.contains(&Atom::State(*p))))
        {
            for c in self.constants.clone() {
                self.derive(
                    Body::Fact { c },
                    Atom::Split(x.clone()),
                    BTreeSet::new(),
                    "Split",
                );
            }
        }
    }

    fn on_push(&mut self, idx: usize) {
        let (h, _, _, head) = self.pushes[idx].clone();
        // Pop against push.
        if let Atom::State(q) = head {
            let pops: Vec<usize> = self.pop_ix.get(&(Some(h), q)).cloned().unwrap_or_default();
            for p in pops {
                self.resolve_pop(p, idx);
            }
            let xs: Vec<BTreeSet<usize>> = self
                .splits
                .iter()
                .filter(|x| x.contains(&q))
                .cloned()
                .collect();
            for x in xs {
                self.split_binary(&x, h, Some((q, idx)));
            }
        }
        let inters: Vec<usize> = self.inter_by_atom.get(&head).cloned().unwrap_or_default();
        for i in inters {
            self.hyper(i, h, Some((head.clone(), idx)));
        }
    }

    fn on_inter(&mut self, idx: usize) {
        for h in self.binaries.clone() {
            self.hyper(idx, h, None);
        }
        let (body, head) = self.inters[idx].clone();
        for c in self.constants.clone() {
            if body
                .iter()
                .all(|a| self.facts.get(&c).is_some_and(|s| s.contains(a)))
            {
                self.derive(Body::Fact { c }, head.clone(), BTreeSet::new(), "Push");
            }
        }
    }

    fn on_pop(&mut self, idx: usize) {
        let (h, _, state, head) = self.pops[idx].clone();
        match h {
            None => {
                if self
                    .facts
                    .get(&self.bot)
                    .is_some_and(|s| s.contains(&Atom::State(state)))
                {
                    self.derive(Body::Fact { c: self.bot }, head, BTreeSet::new(), "Push");
                }
            }
            Some(h) => {
                let pushes: Vec<usize> = self
                    .push_ix
                    .get(&(h, Atom::State(state)))
                    .cloned()
                    .unwrap_or_default();
                for p in pushes {
                    self.resolve_pop(idx, p);
                }
            }
        }
    }

    /// The popped component survives; the other one is split off.
    fn resolve_pop(&mut self, pop: usize, push: usize) {
        let (_, taken, _, head) = self.pops[pop].clone();
        let (_, left, right, _) = self.pushes[push].clone();
        let (kept, dropped) = if taken == 0 {
            (left, right)
        } else {
            (right, left)
        };
        self.derive(
            Body::Inter { body: kept },
            head,
            [dropped].into_iter().collect(),
            "Intermediate",
        );
    }

    /// Hyper-resolution of an intermediate clause against one push per body atom at `h`.
    fn hyper(&mut self, inter: usize, h: usize, fixed: Option<(Atom, usize)>) {
        let (body, head) = self.inters[inter].clone();
        let mut choices: Vec<Vec<usize>> = Vec::new();
        for a in &body {
            match &fixed {
                Some((fa, fi)) if fa == a => choices.push(vec![*fi]),
                _ => {
                    let v = self
                        .push_ix
                        .get(&(h, a.clone()))
                        .cloned()
                        .unwrap_or_default();
                    if v.is_empty() {
                        return;
                    }
                    choices.push(v);
                }
            }
        }
        let tag = if body.len() > 1 {
            "Alternating"
        } else {
            "Push"
        };
        self.combine(&choices, |e, picks| {
            let mut l = AtomSet::new();
            let mut r = AtomSet::new();
            for &p in picks {
                l.extend(e.pushes[p].1.iter().cloned());
                r.extend(e.pushes[p].2.iter().cloned());
            }
            e.derive(
                Body::Push {
                    h,
                    left: l,
                    right: r,
                },
                head.clone(),
                BTreeSet::new(),
                tag,
            );
        });
    }

    fn combine(&mut self, choices: &[Vec<usize>], mut f: impl FnMut(&mut Engine, &[usize])) {
        if choices.is_empty() {
            f(self, &[]);
            return;
        }
        let mut ix = vec![0usize; choices.len()];
        loop {
            let picks: Vec<usize> = ix.iter().zip(choices).map(|(&i, c)| c[i]).collect();
            f(self, &picks);
            let mut k = 0;
            loop {
                ix[k] += 1;
                if ix[k] < choices[k].len() {
                    break;
                }
                ix[k] = 0;
                k += 1;
                if k == choices.len() {
                    return;
                }
            }
        }
    }

    fn define_split(&mut self, x: BTreeSet<usize>) {
        for g in self.binaries.clone() {
            self.split_binary(&x, g, None);
        }
        let consts: Vec<usize> = self.facts.keys().copied().collect();
        for b in consts {
            self.split_constant(&x, b);
        }
    }

    /// `X^R(h(y1,y2))` from pushes of every member of `X` at one symbol `g`,
    /// for every binary `h` (labels are irrelevant to the relation).
    fn split_binary(&mut self, x: &BTreeSet<usize>, g: usize, fixed: Option<(usize, usize)>) {
        debug_assert_eq!(self.relation, Relation::StructEq);
        let mut choices = Vec::new();
        for &p in x {
            match fixed {
                Some((fq, fi)) if fq == p => choices.push(vec![fi]),
                _ => {
                    let v = self
                        .push_ix
                        .get(&(g, Atom::State(p)))
                        .cloned()
                        .unwrap_or_default();
                    if v.is_empty() {
                        return;
                    }
                    choices.push(v);
                }
            }
        }
        let head = Atom::Split(x.clone());
        let binaries = self.binaries.clone();
        self.combine(&choices, |e, picks| {
            let mut l = AtomSet::new();
            let mut r = AtomSet::new();
            for &p in picks {
                l.extend(e.pushes[p].1.iter().cloned());
                r.extend(e.pushes[p].2.iter().cloned());
            }
            let (l, r) = (close_under_relation(&l), close_under_relation(&r));
            for &h in &binaries {
                e.derive(
                    Body::Push {
                        h,
                        left: l.clone(),
                        right: r.clone(),
                    },
                    head.clone(),
                    BTreeSet::new(),
                    "Split",
                );
            }
        });
    }
}

/// Conjunction nonemptiness over facts and push clauses.
struct Nonempty<'a> {
    facts: &'a HashMap<usize, BTreeSet<Atom>>,
    pushes: &'a [(usize, AtomSet, AtomSet, Atom)],
    by_key: HashMap<(usize, &'a Atom), Vec<usize>>,
    binaries: &'a [usize],
    known: HashSet<AtomSet>,
}

impl<'a> Nonempty<'a> {
    fn new(
        facts: &'a HashMap<usize, BTreeSet<Atom>>,
        pushes: &'a [(usize, AtomSet, AtomSet, Atom)],
        binaries: &'a [usize],
    ) -> Nonempty<'a> {
        let mut by_key: HashMap<(usize, &Atom), Vec<usize>> = HashMap::new();
        for (i, p) in pushes.iter().enumerate() {
            by_key.entry((p.0, &p.3)).or_default().push(i);
        }
        Nonempty {
            facts,
            pushes,
            by_key,
            binaries,
            known: HashSet::new(),
        }
    }

    /// Least fixpoint over every set reachable from `goal` by decomposition.
    fn holds(&mut self, goal: &AtomSet) -> bool {
        if goal.is_empty() || self.known.contains(goal) {
            return true;
        }
        let mut needed: Vec<AtomSet> = vec![goal.clone()];
        let mut seen: HashSet<AtomSet> = needed.iter().cloned().collect();
        // For each set, its candidate decompositions into (left, right) pairs.
        let mut decomps: HashMap<AtomSet, Vec<(AtomSet, AtomSet)>> = HashMap::new();
        let mut i = 0;
        while i < needed.len() {
            let s = needed[i].clone();
            i += 1;
            let mut ds = Vec::new();
            for &h in self.binaries {
                let mut choices: Vec<&Vec<usize>> = Vec::new();
                let mut ok = true;
                for a in &s {
                    match self.by_key.get(&(h, a)) {
                        Some(v) => choices.push(v),
                        None => {
                            ok = false;
                            break;
                        }
                    }
                }
                if !ok {
                    continue;
                }
                let mut ix = vec![0usize; choices.len()];
                loop {
                    let mut l = AtomSet::new();
                    let mut r = AtomSet::new();
                    for (k, c) in choices.iter().enumerate() {
                        let p = &self.pushes[c[ix[k]]];
                        l.extend(p.1.iter().cloned());
                        r.extend(p.2.iter().cloned());
                    }
                    for x in [&l, &r] {
                        if !x.is_empty() && seen.insert(x.clone()) {
                            needed.push(x.clone());
                        }
                    }
                    ds.push((l, r));
                    let mut k = 0;
                    loop {
                        if k == ix.len() {
                            break;
                        }
                        ix[k] += 1;
                        if ix[k] < choices[k].len() {
                            break;
                        }
                        ix[k] = 0;
                        k += 1;
                    }
                    if k == ix.len() {
                        break;
                    }
                }
            }
            decomps.insert(s, ds);
        }
        loop {
            let mut changed = false;
            for s in &needed {
                if self.known.contains(s) {
                    continue;
                }
                let at_const = self.facts.values().any(|f| s.is_subset(f));
                let ok = at_const
                    || decomps[s].iter().any(|(l, r)| {
                        (l.is_empty() || self.known.contains(l))
                            && (r.is_empty() || self.known.contains(r))
                    });
                if ok {
                    self.known.insert(s.clone());
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        self.known.contains(goal)
    }
}

/// Per-state memory automata sharing one set of TA states.
#[derive(Debug, Clone)]
pub struct MemoryTa {
    pub ta: Ta,
    /// TA states whose type contains `Q_q`, for each source state `q`.
    pub accepting: Vec<BTreeSet<usize>>,
    /// Atoms holding at each TA state.
    pub types: Vec<AtomSet>,
}

impl MemoryTa {
    pub fn for_state(&self, q: usize) -> Ta {
        let mut t = self.ta.clone();
        t.finals = self.accepting[q].clone();
        t
    }
}

impl Saturated {
    /// Whether `M(a, q)` is nonempty.
    pub fn nonempty(&self, q: usize) -> bool {
        let s: AtomSet = [Atom::State(q)].into_iter().collect();
        if self.known.contains(&s) {
            return true;
        }
        Nonempty::new(&self.facts, &self.pushes, &self.binaries).holds(&s)
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    fn closure(&self, mut t: AtomSet) -> AtomSet {
        loop {
            let mut grew = false;
            for (b, h) in &self.inters {
                if !t.contains(h) && b.is_subset(&t) {
                    t.insert(h.clone());
                    grew = true;
                }
            }
            if !grew {
                return t;
            }
        }
    }

    /// Subset construction over the atoms true at each memory.
    pub fn extract(&self) -> MemoryTa {
        let mut ta = Ta::new("memory", &self.gamma.without_bot());
        let mut types: Vec<AtomSet> = Vec::new();
        let mut ids: HashMap<AtomSet, usize> = HashMap::new();
        let mut intern = |t: AtomSet, ta: &mut Ta, types: &mut Vec<AtomSet>| -> usize {
            if let Some(&i) = ids.get(&t) {
                return i;
            }
            let i = ta.add_state(format!("t{}", types.len()));
            ids.insert(t.clone(), i);
            types.push(t);
            i
        };
        for &c in &self.constants {
            let t = self.closure(self.facts.get(&c).cloned().unwrap_or_default());
            if !t.is_empty() {
                let i = intern(t, &mut ta, &mut types);
                ta.add_rule(c, vec![], i);
            }
        }
        let mut by_h: BTreeMap<usize, Vec<&(usize, AtomSet, AtomSet, Atom)>> = BTreeMap::new();
        for p in &self.pushes {
            by_h.entry(p.0).or_default().push(p);
        }
        let mut done: HashSet<(usize, usize, usize)> = HashSet::new();
        loop {
            let n = types.len();
            let mut grew = false;
            for (&h, ps) in &by_h {
                for x in 0..n {
                    for y in 0..n {
                        if !done.insert((h, x, y)) {
                            continue;
                        }
                        let heads: AtomSet = ps
                            .iter()
                            .filter(|p| p.1.is_subset(&types[x]) && p.2.is_subset(&types[y]))
                            .map(|p| p.3.clone())
                            .collect();
                        if heads.is_empty() {
                            continue;
                        }
                        let t = self.closure(heads);
                        let before = types.len();
                        let i = intern(t, &mut ta, &mut types);
                        grew |= types.len() != before;
                        ta.add_rule(h, vec![x, y], i);
                    }
                }
            }
            if !grew && types.len() == n {
                break;
            }
        }
        let accepting = (0..self.names.len())
            .map(|q| {
                (0..types.len())
                    .filter(|&i| types[i].contains(&Atom::State(q)))
                    .collect()
            })
            .collect();
        MemoryTa {
            ta,
            accepting,
            types,
        }
    }

    /// Retained clauses in display form, in retention order.
    pub fn clauses(&self) -> Vec<Clause> {
        self.retained.iter().map(|i| self.display(i)).collect()
    }

    /// One line per retained clause: `<tag> | body => head`.
    pub fn trace(&self) -> Vec<String> {
        self.clauses().iter().map(|c| c.to_string()).collect()
    }

    fn atom_name(&self, a: &Atom) -> String {
        match a {
            Atom::State(q) => format!("Q_{}", self.names[*q]),
            Atom::Split(x) => {
                let v: Vec<&str> = x.iter().map(|q| self.names[*q].as_str()).collect();
                format!("S_{{{}}}^R", v.join(","))
            }
        }
    }

    fn prop_name(&self, s: &AtomSet) -> String {
        let v: Vec<String> = s.iter().map(|a| self.atom_name(a)).collect();
        format!("N_{{{}}}", v.join(","))
    }

    fn display(&self, i: &Item) -> Clause {
        if i.body == Body::Prop {
            let text = self.prop_name(i.props.iter().next().expect("prop"));
            return Clause {
                tag: i.tag,
                body: Vec::new(),
                head: Literal {
                    text,
                    kind: LitKind::Prop,
                    var: None,
                },
            };
        }
        let mut body = Vec::new();
        for p in &i.props {
            body.push(Literal {
                text: self.prop_name(p),
                kind: LitKind::Prop,
                var: None,
            });
        }
        let lit = |a: &Atom, arg: &str, var: Option<u8>, kind: LitKind| Literal {
            text: format!("{}({arg})", self.atom_name(a)),
            kind,
            var,
        };
        let g = |h: usize| self.gamma.name(h).to_string();
        let head = match &i.body {
            Body::Fact { c } => lit(&i.head, &g(*c), None, LitKind::Ground),
            Body::Push { h, left, right } => {
                for a in left {
                    body.push(lit(a, "y1", Some(1), LitKind::Var));
                }
                for a in right {
                    body.push(lit(a, "y2", Some(2), LitKind::Var));
                }
                lit(&i.head, &format!("{}(y1,y2)", g(*h)), None, LitKind::NonVar)
            }
            Body::Inter { body: b } => {
                for a in b {
                    body.push(lit(a, "y1", Some(1), LitKind::Var));
                }
                lit(&i.head, "y1", Some(1), LitKind::Var)
            }
            Body::Prop => unreachable!(),
            Body::Pop { h, taken, state } => match h {
                None => {
                    body.push(lit(&Atom::State(*state), BOT, None, LitKind::Ground));
                    lit(&i.head, BOT, None, LitKind::Ground)
                }
                Some(h) => {
                    body.push(lit(
                        &Atom::State(*state),
                        &format!("{}(y1,y2)", g(*h)),
                        None,
                        LitKind::NonVar,
                    ));
                    let v = if *taken == 0 { "y1" } else { "y2" };
                    lit(&i.head, v, Some(*taken as u8 + 1), LitKind::Var)
                }
            },
        };
        Clause {
            tag: i.tag,
            body,
            head,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LitKind {
    Prop,
    Var,
    NonVar,
    Ground,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Literal {
    pub text: String,
    pub kind: LitKind,
    pub var: Option<u8>,
}

/// A retained clause in display form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Clause {
    pub tag: &'static str,
    pub body: Vec<Literal>,
    pub head: Literal,
}

impl Clause {
    /// Body literals chosen by the selection strategy: non-variable literals,
    /// then propositional ones, then literals on a variable missing from the
    /// head and shared with another literal, then any literal on such a
    /// variable, then variable literals, then the sole literal.
    pub fn selected(&self) -> Vec<usize> {
        let idx = |p: &dyn Fn(&Literal) -> bool| -> Vec<usize> {
            self.body
                .iter()
                .enumerate()
                .filter(|(_, l)| p(l))
                .map(|(i, _)| i)
                .collect()
        };
        let nonvar = idx(&|l| matches!(l.kind, LitKind::NonVar | LitKind::Ground));
        if !nonvar.is_empty() {
            return nonvar;
        }
        let props = idx(&|l| l.kind == LitKind::Prop);
        if !props.is_empty() {
            return props;
        }
        let head_var = self.head.var;
        let e1 = idx(&|l| l.var.is_some() && l.var != head_var);
        let e2: HashSet<usize> = {
            let mut count: HashMap<u8, usize> = HashMap::new();
            for l in &self.body {
                if let Some(v) = l.var {
                    *count.entry(v).or_default() += 1;
                }
            }
            idx(&|l| l.var.is_some_and(|v| count[&v] > 1))
                .into_iter()
                .collect()
        };
        let both: Vec<usize> = e1.iter().copied().filter(|i| e2.contains(i)).collect();
        if !both.is_empty() {
            return both;
        }
        if !e1.is_empty() {
            return e1;
        }
        let vars = idx(&|l| l.kind == LitKind::Var);
        if !vars.is_empty() {
            return vars;
        }
        if self.body.len() == 1 {
            vec![0]
        } else {
            Vec::new()
        }
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let b: Vec<&str> = self.body.iter().map(|l| l.text.as_str()).collect();
        write!(f, "{} | {} => {}", self.tag, b.join(", "), self.head.text)
    }
}

/// Clause system of a built-in relation over a memory signature.
#[derive(Debug, Clone)]
pub struct RelationSystem {
    pub kind: RelationKind,
    pub gamma: Signature,
    /// Display clauses, forms (A) to (F).
    pub clauses: Vec<String>,
    /// `(i, j) -> (k, l)`: a chain `R_i(x,y), R_j(y,z)` is resolved by `R_k(x,y), R_l(x,z)`.
    pub chain_resolver: BTreeMap<(usize, usize), (usize, usize)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RelationKind {
    SynEq,
    StructEq,
    Universal,
}

pub fn relation_system(kind: RelationKind, gamma: &Signature) -> RelationSystem {
    let g = gamma.with_bot();
    let consts: Vec<&str> = g
        .decls()
        .iter()
        .filter(|d| d.arity == 0)
        .map(|d| d.name.as_str())
        .collect();
    let bins: Vec<&str> = g
        .decls()
        .iter()
        .filter(|d| d.arity == 2)
        .map(|d| d.name.as_str())
        .collect();
    let mut clauses = Vec::new();
    match kind {
        RelationKind::Universal => clauses.push("(A) | => R(x,y)".to_string()),
        RelationKind::SynEq | RelationKind::StructEq => {
            for a in &consts {
                for b in &consts {
                    if kind == RelationKind::StructEq || a == b {
                        clauses.push(format!("(A) | => R({a},{b})"));
                    }
                }
            }
            for f in &bins {
                for h in &bins {
                    if kind == RelationKind::StructEq || f == h {
                        clauses.push(format!(
                            "(D) | R(x1,x2), R(y1,y2) => R({f}(x1,y1),{h}(x2,y2))"
                        ));
                    }
                }
            }
        }
    }
    RelationSystem {
        kind,
        gamma: g,
        clauses,
        chain_resolver: [((0, 0), (0, 0))].into_iter().collect(),
    }
}

impl RelationSystem {
    /// Whether `R(m1, m2)` follows from the clauses.
    pub fn derivable(&self, m1: &Term, m2: &Term) -> bool {
        match self.kind {
            RelationKind::Universal => true,
            RelationKind::SynEq => m1 == m2,
            RelationKind::StructEq => match (m1.arity(), m2.arity()) {
                (0, 0) => true,
                (2, 2) => {
                    self.derivable(m1.kid(0), m2.kid(0)) && self.derivable(m1.kid(1), m2.kid(1))
                }
                _ => false,
            },
        }
    }
}

/// Memory automata for every state, by saturation then extraction.
pub fn memory_automata(a: &Vtam) -> Result<MemoryTa> {
    Ok(saturate(a, SaturationOptions::default())?.extract())
}

/// Whether a category reads memory from the clause engine's point of view.
pub fn translatable(cat: Category) -> bool {
    !cat.is_bt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::format::parse_vtam;
    use crate::term::parse_term_free;

    fn t(s: &str) -> Term {
        parse_term_free(s).unwrap()
    }

    const TWO: &str = "vtam two relation none sigma { push: a/0 f/2 ; pop11: p/2 } gamma { h/2 c/0 }
                       states { q qq qqq } final { qq }
                       rules { a -> q(c) ; f(q(y1), q(y2)) -> qq(h(y1,y2)) ; p(qq(h(y11,y12)), q(y2)) -> qqq(y11) ; }";

    #[test]
    fn two_rule_memory_languages() {
        let a = parse_vtam(TWO).unwrap();
        let m = memory_automata(&a).unwrap();
        let q = m.for_state(0);
        let qq = m.for_state(1);
        let qqq = m.for_state(2);
        assert!(q.accepts(&t("c")) && !q.accepts(&t("h(c,c)")));
        assert!(qq.accepts(&t("h(c,c)")) && !qq.accepts(&t("c")));
        assert!(qqq.accepts(&t("c")) && !qqq.accepts(&t("h(c,c)")));
    }

    #[test]
    fn pop_against_push_gives_intermediate() {
        let a = parse_vtam(TWO).unwrap();
        let s = saturate(&a, SaturationOptions::default()).unwrap();
        let trace = s.trace();
        assert!(
            trace
                .iter()
                .any(|l| l.starts_with("Intermediate | N_{Q_q}, Q_q(y1) => Q_qqq(y1)")),
            "{trace:#?}"
        );
        assert!(
            trace.iter().any(|l| l.starts_with("Propositional")),
            "{trace:#?}"
        );
        let pop = s.clauses().into_iter().find(|c| c.tag == "(3)").unwrap();
        assert_eq!(pop.selected(), vec![1]);
    }

    #[test]
    fn unreachable_state_is_empty() {
        let src = "vtam u relation none sigma { int0: a/0 } gamma { } states { q q0 } final { q }
                   rules { a -> q(bot) ; }";
        let a = parse_vtam(src).unwrap();
        let s = saturate(&a, SaturationOptions::default()).unwrap();
        assert!(s.nonempty(0));
        assert!(!s.nonempty(1));
        assert!(s.extract().for_state(1).is_empty());
    }

    #[test]
    fn negative_guards_are_refused() {
        let src = "vtam n relation struct sigma { int0: a/0 ; cint1: c/2 } gamma { } states { q } final { q }
                   rules { a -> q(bot) ; c(q(y1), q(y2)) -[neq]-> q(y1) ; }";
        assert!(saturate(&parse_vtam(src).unwrap(), SaturationOptions::default()).is_err());
    }

    #[test]
    fn relation_systems() {
        let g = Signature::from_spec("c/0 d/0 h/2 k/2").unwrap();
        let st = relation_system(RelationKind::StructEq, &g);
        assert!(st.derivable(&t("c"), &t("d")));
        assert!(st.derivable(&t("h(c,c)"), &t("k(d,d)")));
        let sy = relation_system(RelationKind::SynEq, &g);
        assert!(!sy.derivable(&t("c"), &t("d")));
        assert!(relation_system(RelationKind::Universal, &g).derivable(&t("c"), &t("h(c,c)")));
        assert_eq!(st.chain_resolver[&(0, 0)], (0, 0));
    }
}
