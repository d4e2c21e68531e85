//! The automaton model: signature partition, rules, run semantics, shapes,
//! completion and determinism.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::term::{Signature, SymbolDecl, Term, BOT};

/// Memory-operation family of an input symbol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Category {
    Push,
    Pop11,
    Pop12,
    Pop21,
    Pop22,
    Int0,
    Int1,
    Int2,
    Cint1,
    Cint2,
    Bt1,
    Bt2,
}

impl Category {
    pub const ALL: [Category; 12] = [
        Category::Push,
        Category::Pop11,
        Category::Pop12,
        Category::Pop21,
        Category::Pop22,
        Category::Int0,
        Category::Int1,
        Category::Int2,
        Category::Cint1,
        Category::Cint2,
        Category::Bt1,
        Category::Bt2,
    ];

    pub fn keyword(self) -> &'static str {
        match self {
            Category::Push => "push",
            Category::Pop11 => "pop11",
            Category::Pop12 => "pop12",
            Category::Pop21 => "pop21",
            Category::Pop22 => "pop22",
            Category::Int0 => "int0",
            Category::Int1 => "int1",
            Category::Int2 => "int2",
            Category::Cint1 => "cint1",
            Category::Cint2 => "cint2",
            Category::Bt1 => "bt1",
            Category::Bt2 => "bt2",
        }
    }

    pub fn from_keyword(s: &str) -> Option<Category> {
        Category::ALL.into_iter().find(|c| c.keyword() == s)
    }

    pub fn allows_arity(self, arity: usize) -> bool {
        match self {
            Category::Push => arity == 0 || arity == 2,
            Category::Int0 => arity == 0,
            _ => arity == 2,
        }
    }

    pub fn is_pop(self) -> bool {
        matches!(
            self,
            Category::Pop11 | Category::Pop12 | Category::Pop21 | Category::Pop22
        )
    }

    /// Child (0 or 1) whose memory a POP symbol reads.
    pub fn popped_child(self) -> Option<usize> {
        match self {
            Category::Pop11 | Category::Pop12 => Some(0),
            Category::Pop21 | Category::Pop22 => Some(1),
            _ => None,
        }
    }

    /// Child (0 or 1) whose memory an INT-like symbol keeps.
    pub fn kept_child(self) -> Option<usize> {
        match self {
            Category::Int1 | Category::Cint1 | Category::Bt1 => Some(0),
            Category::Int2 | Category::Cint2 | Category::Bt2 => Some(1),
            _ => None,
        }
    }

    pub fn is_cint(self) -> bool {
        matches!(self, Category::Cint1 | Category::Cint2)
    }

    pub fn is_bt(self) -> bool {
        matches!(self, Category::Bt1 | Category::Bt2)
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.keyword().to_ascii_uppercase())
    }
}

/// Input signature with a category per symbol.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PartitionedSignature {
    base: Signature,
    cats: Vec<Category>,
}

impl PartitionedSignature {
    pub fn new(
        decls: impl IntoIterator<Item = (SymbolDecl, Category)>,
    ) -> Result<PartitionedSignature> {
        let mut p = PartitionedSignature::default();
        for (d, c) in decls {
            p.add(d, c)?;
        }
        Ok(p)
    }

    /// Builds from `("a/0", Int0)`-style pairs.
    pub fn from_pairs(pairs: &[(&str, usize, Category)]) -> Result<PartitionedSignature> {
        PartitionedSignature::new(pairs.iter().map(|(n, a, c)| (SymbolDecl::new(*n, *a), *c)))
    }

    pub fn add(&mut self, d: SymbolDecl, c: Category) -> Result<usize> {
        if !c.allows_arity(d.arity) {
            return Err(Error::Signature(format!(
                "`{}/{}` cannot be in category {}: constants are PUSH or INT0, binary symbols anything but INT0",
                d.name, d.arity, c
            )));
        }
        if d.name == BOT {
            return Err(Error::Signature(format!(
                "`{BOT}` is reserved for the empty memory"
            )));
        }
        if d.arity != 0 && d.arity != 2 {
            return Err(Error::Signature(format!(
                "`{}` has arity {}",
                d.name, d.arity
            )));
        }
        let i = self.base.add(d)?;
        self.cats.push(c);
        Ok(i)
    }

    pub fn base(&self) -> &Signature {
        &self.base
    }

    pub fn len(&self) -> usize {
        self.cats.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cats.is_empty()
    }

    pub fn category(&self, sym: usize) -> Category {
        self.cats[sym]
    }

    pub fn category_of(&self, name: &str) -> Option<Category> {
        self.base.index_of(name).map(|i| self.cats[i])
    }

    pub fn name(&self, sym: usize) -> &str {
        self.base.name(sym)
    }

    pub fn arity(&self, sym: usize) -> usize {
        self.base.decls()[sym].arity
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.base.index_of(name)
    }

    /// `(index, name, arity, category)` for every symbol.
    pub fn iter(&self) -> impl Iterator<Item = (usize, &str, usize, Category)> + '_ {
        self.base
            .decls()
            .iter()
            .enumerate()
            .map(move |(i, d)| (i, d.name.as_str(), d.arity, self.cats[i]))
    }

    pub fn has_category(&self, pred: impl Fn(Category) -> bool) -> bool {
        self.cats.iter().any(|&c| pred(c))
    }
}

/// Relation used by memory constraints.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Relation {
    None,
    SynEq,
    StructEq,
}

impl Relation {
    pub fn keyword(self) -> &'static str {
        match self {
            Relation::None => "none",
            Relation::SynEq => "syn",
            Relation::StructEq => "struct",
        }
    }

    pub fn from_keyword(s: &str) -> Option<Relation> {
        match s {
            "none" => Some(Relation::None),
            "syn" => Some(Relation::SynEq),
            "struct" => Some(Relation::StructEq),
            _ => None,
        }
    }

    /// Evaluates the relation on two memories.
    pub fn holds(self, m1: &Term, m2: &Term) -> bool {
        match self {
            Relation::None => false,
            Relation::SynEq => m1 == m2,
            Relation::StructEq => term_struct_eq(m1, m2),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Guard {
    None,
    RelPos,
    RelNeg,
    BtEq,
    BtNeq,
}

impl Guard {
    pub fn label(self) -> Option<&'static str> {
        match self {
            Guard::None => None,
            Guard::RelPos => Some("eq"),
            Guard::RelNeg => Some("neq"),
            Guard::BtEq => Some("bt-eq"),
            Guard::BtNeq => Some("bt-neq"),
        }
    }

    pub fn from_label(s: &str) -> Option<Guard> {
        match s {
            "eq" => Some(Guard::RelPos),
            "neq" => Some(Guard::RelNeg),
            "bt-eq" => Some(Guard::BtEq),
            "bt-neq" => Some(Guard::BtNeq),
            _ => None,
        }
    }

    /// The guard of the opposite sign.
    pub fn negated(self) -> Guard {
        match self {
            Guard::RelPos => Guard::RelNeg,
            Guard::RelNeg => Guard::RelPos,
            Guard::BtEq => Guard::BtNeq,
            Guard::BtNeq => Guard::BtEq,
            Guard::None => Guard::None,
        }
    }

    pub fn is_positive(self) -> bool {
        matches!(self, Guard::RelPos | Guard::BtEq)
    }
}

/// What a rule does to the memory. Symbol payloads index the memory signature.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Action {
    PushWith(usize),
    PushConst(usize),
    PopLeftOfLeft(usize),
    PopRightOfLeft(usize),
    PopLeftOfRight(usize),
    PopRightOfRight(usize),
    /// The popped memory is `bot`; which child is popped follows from the category.
    PopBottom,
    KeepLeft,
    KeepRight,
    EmitBot,
}

impl Action {
    /// Memory symbol matched by a POP action.
    pub fn popped_symbol(self) -> Option<usize> {
        match self {
            Action::PopLeftOfLeft(h)
            | Action::PopRightOfLeft(h)
            | Action::PopLeftOfRight(h)
            | Action::PopRightOfRight(h) => Some(h),
            _ => None,
        }
    }

    /// Which component of the popped symbol becomes the new memory.
    pub fn taken_component(self) -> Option<usize> {
        match self {
            Action::PopLeftOfLeft(_) | Action::PopLeftOfRight(_) => Some(0),
            Action::PopRightOfLeft(_) | Action::PopRightOfRight(_) => Some(1),
            _ => None,
        }
    }

    /// The POP action for a category, or `None` for non-POP categories.
    pub fn pop_for(cat: Category, h: usize) -> Option<Action> {
        match cat {
            Category::Pop11 => Some(Action::PopLeftOfLeft(h)),
            Category::Pop12 => Some(Action::PopRightOfLeft(h)),
            Category::Pop21 => Some(Action::PopLeftOfRight(h)),
            Category::Pop22 => Some(Action::PopRightOfRight(h)),
            _ => None,
        }
    }

    pub fn keep(child: usize) -> Action {
        if child == 0 {
            Action::KeepLeft
        } else {
            Action::KeepRight
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Rule {
    pub symbol: usize,
    /// Empty for constants, two states for binary symbols.
    pub left: Vec<usize>,
    pub guard: Guard,
    pub action: Action,
    pub target: usize,
}

impl Rule {
    pub fn constant(symbol: usize, action: Action, target: usize) -> Rule {
        Rule {
            symbol,
            left: Vec::new(),
            guard: Guard::None,
            action,
            target,
        }
    }

    pub fn binary(
        symbol: usize,
        q1: usize,
        q2: usize,
        guard: Guard,
        action: Action,
        target: usize,
    ) -> Rule {
        Rule {
            symbol,
            left: vec![q1, q2],
            guard,
            action,
            target,
        }
    }
}

/// A visibly tree automaton with memory, possibly with constraints.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vtam {
    pub name: String,
    pub sigma: PartitionedSignature,
    /// Memory signature; `bot` is implicit and never listed.
    pub gamma: Signature,
    pub relation: Relation,
    pub states: Vec<String>,
    pub finals: BTreeSet<usize>,
    pub rules: Vec<Rule>,
}

/// A configuration `q(m)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Configuration {
    pub state: usize,
    pub memory: Term,
}

impl Vtam {
    pub fn new(
        name: impl Into<String>,
        sigma: PartitionedSignature,
        gamma: Signature,
        relation: Relation,
    ) -> Vtam {
        Vtam {
            name: name.into(),
            sigma,
            gamma,
            relation,
            states: Vec::new(),
            finals: BTreeSet::new(),
            rules: Vec::new(),
        }
    }

    pub fn add_state(&mut self, name: impl Into<String>) -> usize {
        self.states.push(name.into());
        self.states.len() - 1
    }

    /// Adds a state under a name not yet in use.
    pub fn add_fresh_state(&mut self, base: &str) -> usize {
        let taken: HashSet<&str> = self.states.iter().map(String::as_str).collect();
        let name = if taken.contains(base) {
            (1..)
                .map(|i| format!("{base}_{i}"))
                .find(|n| !taken.contains(n.as_str()))
                .unwrap()
        } else {
            base.to_string()
        };
        self.add_state(name)
    }

    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.states.iter().position(|s| s == name)
    }

    pub fn symbol_index(&self, name: &str) -> Option<usize> {
        self.sigma.index_of(name)
    }

    pub fn is_final(&self, q: usize) -> bool {
        self.finals.contains(&q)
    }

    pub fn category(&self, sym: usize) -> Category {
        self.sigma.category(sym)
    }

    /// Adds a rule unless an identical one exists.
    pub fn add_rule(&mut self, r: Rule) {
        if !self.rules.contains(&r) {
            self.rules.push(r);
        }
    }

    pub fn has_guard(&self, pred: impl Fn(Guard) -> bool) -> bool {
        self.rules.iter().any(|r| pred(r.guard))
    }

    pub fn has_bt(&self) -> bool {
        self.sigma.has_category(Category::is_bt)
    }

    /// Memory symbol name for an index, `bot` aware.
    pub fn gamma_name(&self, h: usize) -> &str {
        self.gamma.name(h)
    }

    /// Renders a rule in the file syntax.
    pub fn show_rule(&self, r: &Rule) -> String {
        let st = |q: usize| {
            self.states
                .get(q)
                .cloned()
                .unwrap_or_else(|| format!("<state {q}>"))
        };
        let gm = |h: usize| {
            if h < self.gamma.len() {
                self.gamma.name(h).to_string()
            } else {
                format!("<memory symbol {h}>")
            }
        };
        let f = if r.symbol < self.sigma.len() {
            self.sigma.name(r.symbol).to_string()
        } else {
            format!("<symbol {}>", r.symbol)
        };
        let arrow = match r.guard.label() {
            Some(l) => format!("-[{l}]->"),
            None => "->".to_string(),
        };
        if r.left.len() != 2 {
            let rhs = match r.action {
                Action::EmitBot => BOT.to_string(),
                Action::PushConst(c) => gm(c),
                other => format!("<{other:?}>"),
            };
            return format!("{f} {arrow} {}({rhs})", st(r.target));
        }
        let (q1, q2) = (st(r.left[0]), st(r.left[1]));
        let pop_right = r.symbol < self.sigma.len()
            && matches!(
                self.sigma.category(r.symbol),
                Category::Pop21 | Category::Pop22
            );
        let (lhs1, lhs2, rhs) = match r.action {
            Action::PushWith(h) => (
                "y1".to_string(),
                "y2".to_string(),
                format!("{}(y1,y2)", gm(h)),
            ),
            Action::KeepLeft => ("y1".into(), "y2".into(), "y1".into()),
            Action::KeepRight => ("y1".into(), "y2".into(), "y2".into()),
            Action::PopLeftOfLeft(h) => (format!("{}(y11,y12)", gm(h)), "y2".into(), "y11".into()),
            Action::PopRightOfLeft(h) => (format!("{}(y11,y12)", gm(h)), "y2".into(), "y12".into()),
            Action::PopLeftOfRight(h) => ("y1".into(), format!("{}(y21,y22)", gm(h)), "y21".into()),
            Action::PopRightOfRight(h) => {
                ("y1".into(), format!("{}(y21,y22)", gm(h)), "y22".into())
            }
            Action::PopBottom if pop_right => ("y1".into(), BOT.into(), BOT.into()),
            Action::PopBottom => (BOT.into(), "y2".into(), BOT.into()),
            other => ("y1".into(), "y2".into(), format!("<{other:?}>")),
        };
        format!(
            "{f}({q1}({lhs1}), {q2}({lhs2})) {arrow} {}({rhs})",
            st(r.target)
        )
    }

    /// Checks every structural invariant, reporting all violations.
    pub fn validate(&self) -> Result<()> {
        let mut diags = Vec::new();
        let mut names = HashSet::new();
        for s in &self.states {
            if !crate::lex::is_identifier(s) {
                diags.push(format!("state `{s}` is not an identifier"));
            }
            if !names.insert(s) {
                diags.push(format!("duplicate state `{s}`"));
            }
        }
        for &q in &self.finals {
            if q >= self.states.len() {
                diags.push(format!("final state index {q} is not a declared state"));
            }
        }
        if self.gamma.contains(BOT) {
            diags.push(format!(
                "`{BOT}` must not be declared in the memory signature"
            ));
        }
        for (i, name, arity, cat) in self.sigma.iter() {
            if !cat.allows_arity(arity) {
                diags.push(format!(
                    "symbol `{name}/{arity}` cannot be in category {cat}"
                ));
            }
            if cat.is_cint() && self.relation == Relation::None {
                diags.push(format!(
                    "symbol `{name}` is in {cat} but the automaton has relation none"
                ));
            }
            let _ = i;
        }
        for r in &self.rules {
            if let Err(msg) = self.check_rule(r) {
                diags.push(format!("rule `{}`: {msg}", self.show_rule(r)));
            }
        }
        if diags.is_empty() {
            Ok(())
        } else {
            Err(Error::Invalid(diags))
        }
    }

    fn check_rule(&self, r: &Rule) -> std::result::Result<(), String> {
        if r.symbol >= self.sigma.len() {
            return Err("unknown input symbol".into());
        }
        if r.target >= self.states.len() || r.left.iter().any(|&q| q >= self.states.len()) {
            return Err("undeclared state".into());
        }
        let arity = self.sigma.arity(r.symbol);
        if r.left.len() != arity {
            return Err(format!(
                "symbol has arity {arity} but the rule reads {} states",
                r.left.len()
            ));
        }
        let cat = self.sigma.category(r.symbol);
        let binary_gamma = |h: usize| h < self.gamma.len() && self.gamma.decls()[h].arity == 2;
        let nullary_gamma = |h: usize| h < self.gamma.len() && self.gamma.decls()[h].arity == 0;
        let action_ok = match (cat, r.action) {
            (Category::Push, Action::PushConst(c)) if arity == 0 => {
                if !nullary_gamma(c) {
                    return Err("pushed constant must be a nullary memory symbol".into());
                }
                true
            }
            (Category::Push, Action::PushWith(h)) if arity == 2 => {
                if !binary_gamma(h) {
                    return Err("pushed symbol must be a binary memory symbol".into());
                }
                true
            }
            (Category::Int0, Action::EmitBot) => true,
            (Category::Int1 | Category::Cint1 | Category::Bt1, Action::KeepLeft) => true,
            (Category::Int2 | Category::Cint2 | Category::Bt2, Action::KeepRight) => true,
            (c, Action::PopBottom) if c.is_pop() => true,
            (c, a) if c.is_pop() && a.popped_symbol().is_some() => {
                if Action::pop_for(c, a.popped_symbol().unwrap()) != Some(a) {
                    false
                } else if !binary_gamma(a.popped_symbol().unwrap()) {
                    return Err("popped symbol must be a binary memory symbol".into());
                } else {
                    true
                }
            }
            _ => false,
        };
        if !action_ok {
            return Err(format!(
                "visibility violated: the rule form does not belong to category {cat}"
            ));
        }
        match (cat, r.guard) {
            (c, Guard::RelPos | Guard::RelNeg) if c.is_cint() => {
                if self.relation == Relation::None {
                    return Err("memory constraint requires a relation".into());
                }
                Ok(())
            }
            (c, Guard::BtEq | Guard::BtNeq) if c.is_bt() => Ok(()),
            (c, Guard::None) if c.is_cint() || c.is_bt() => {
                Err(format!("{c} rules must carry a guard of their family"))
            }
            (c, Guard::None) => {
                let _ = c;
                Ok(())
            }
            (c, _) if c == Category::Push || c.is_pop() => {
                Err("guarded PUSH/POP rules are not supported".into())
            }
            (c, g) => Err(format!("guard {:?} is not allowed on {c} rules", g)),
        }
    }

    /// All configurations reachable at the root of `t`.
    pub fn all_root_configs(&self, t: &Term, budget: usize) -> Result<BTreeSet<Configuration>> {
        let mut run = Runner::new(self).with_budget(budget);
        Ok(run.configs(t)?.iter().cloned().collect())
    }

    pub fn accepts_by_runs(&self, t: &Term) -> Result<bool> {
        Runner::new(self).accepts(t)
    }

    pub fn is_deterministic(&self) -> bool {
        is_deterministic(self)
    }
}

/// Default per-node configuration cap for runs.
pub const DEFAULT_RUN_BUDGET: usize = 1_000_000;

/// Applies a single rule at a node whose children are in the given configurations.
pub fn apply_rule(a: &Vtam, r: &Rule, kids: &[(&Configuration, &Term)]) -> Option<Term> {
    if kids.len() != r.left.len() {
        return None;
    }
    if kids.is_empty() {
        return match r.action {
            Action::EmitBot => Some(Term::bot()),
            Action::PushConst(c) => Some(Term::leaf(a.gamma.name(c))),
            _ => None,
        };
    }
    let (c1, t1) = kids[0];
    let (c2, t2) = kids[1];
    if c1.state != r.left[0] || c2.state != r.left[1] {
        return None;
    }
    let guard_ok = match r.guard {
        Guard::None => true,
        Guard::RelPos => a.relation.holds(&c1.memory, &c2.memory),
        Guard::RelNeg => a.relation != Relation::None && !a.relation.holds(&c1.memory, &c2.memory),
        Guard::BtEq => t1 == t2,
        Guard::BtNeq => t1 != t2,
    };
    if !guard_ok {
        return None;
    }
    let (m1, m2) = (&c1.memory, &c2.memory);
    let take = |m: &Term, h: usize, k: usize| -> Option<Term> {
        (m.arity() == 2 && m.sym() == a.gamma.name(h)).then(|| m.kid(k).clone())
    };
    match r.action {
        Action::PushWith(h) => Some(Term::bin(a.gamma.name(h), m1.clone(), m2.clone())),
        Action::KeepLeft => Some(m1.clone()),
        Action::KeepRight => Some(m2.clone()),
        Action::PopLeftOfLeft(h) => take(m1, h, 0),
        Action::PopRightOfLeft(h) => take(m1, h, 1),
        Action::PopLeftOfRight(h) => take(m2, h, 0),
        Action::PopRightOfRight(h) => take(m2, h, 1),
        Action::PopBottom => {
            let m = if a.sigma.category(r.symbol).popped_child() == Some(1) {
                m2
            } else {
                m1
            };
            m.is_bot().then(Term::bot)
        }
        Action::EmitBot | Action::PushConst(_) => None,
    }
}

/// Every configuration produced at the root by exactly one rule application.
pub fn step_root(
    a: &Vtam,
    symbol: usize,
    kids: &[(Configuration, Term)],
) -> BTreeSet<Configuration> {
    let refs: Vec<(&Configuration, &Term)> = kids.iter().map(|(c, t)| (c, t)).collect();
    a.rules
        .iter()
        .filter(|r| r.symbol == symbol)
        .filter_map(|r| {
            apply_rule(a, r, &refs).map(|m| Configuration {
                state: r.target,
                memory: m,
            })
        })
        .collect()
}

/// Rules grouped by left-hand side.
#[derive(Debug, Clone, Default)]
pub struct RuleIndex {
    pub leaf: HashMap<usize, Vec<usize>>,
    pub pair: HashMap<(usize, usize, usize), Vec<usize>>,
}

impl RuleIndex {
    pub fn new(a: &Vtam) -> RuleIndex {
        let mut ix = RuleIndex::default();
        for (i, r) in a.rules.iter().enumerate() {
            if r.left.is_empty() {
                ix.leaf.entry(r.symbol).or_default().push(i);
            } else {
                ix.pair
                    .entry((r.symbol, r.left[0], r.left[1]))
                    .or_default()
                    .push(i);
            }
        }
        ix
    }
}

/// Bottom-up evaluator with per-subterm memoization.
pub struct Runner<'a> {
    a: &'a Vtam,
    sym_of: HashMap<Arc<str>, usize>,
    index: RuleIndex,
    memo: HashMap<Term, Arc<Vec<Configuration>>>,
    budget: usize,
}

impl<'a> Runner<'a> {
    pub fn new(a: &'a Vtam) -> Runner<'a> {
        let sym_of = a
            .sigma
            .iter()
            .map(|(i, n, _, _)| (Arc::<str>::from(n), i))
            .collect();
        Runner {
            a,
            sym_of,
            index: RuleIndex::new(a),
            memo: HashMap::new(),
            budget: DEFAULT_RUN_BUDGET,
        }
    }

    pub fn with_budget(mut self, budget: usize) -> Runner<'a> {
        self.budget = budget;
        self
    }

    pub fn automaton(&self) -> &Vtam {
        self.a
    }

    /// Drops memoized results (useful when sweeping huge term sets).
    pub fn clear(&mut self) {
        self.memo.clear();
    }

    pub fn configs(&mut self, t: &Term) -> Result<Arc<Vec<Configuration>>> {
        if let Some(c) = self.memo.get(t) {
            return Ok(c.clone());
        }
        let sym = *self
            .sym_of
            .get(&t.sym_arc())
            .ok_or_else(|| Error::UnknownSymbol(t.sym().to_string()))?;
        if t.arity() != self.a.sigma.arity(sym) {
            return Err(Error::Arity {
                name: t.sym().to_string(),
                expected: self.a.sigma.arity(sym),
                found: t.arity(),
            });
        }
        let mut out: HashSet<Configuration> = HashSet::new();
        if t.arity() == 0 {
            for &ri in self.index.leaf.get(&sym).map(Vec::as_slice).unwrap_or(&[]) {
                let r = &self.a.rules[ri];
                if let Some(m) = apply_rule(self.a, r, &[]) {
                    out.insert(Configuration {
                        state: r.target,
                        memory: m,
                    });
                }
            }
        } else {
            let left = self.configs(t.kid(0))?;
            let right = self.configs(t.kid(1))?;
            for c1 in left.iter() {
                for c2 in right.iter() {
                    let Some(rs) = self.index.pair.get(&(sym, c1.state, c2.state)) else {
                        continue;
                    };
                    for &ri in rs {
                        let r = &self.a.rules[ri];
                        if let Some(m) = apply_rule(self.a, r, &[(c1, t.kid(0)), (c2, t.kid(1))]) {
                            out.insert(Configuration {
                                state: r.target,
                                memory: m,
                            });
                            if out.len() > self.budget {
                                return Err(Error::Budget(format!(
                                    "more than {} configurations at a node of size {}",
                                    self.budget,
                                    t.size()
                                )));
                            }
                        }
                    }
                }
            }
        }
        let mut v: Vec<Configuration> = out.into_iter().collect();
        v.sort();
        let v = Arc::new(v);
        self.memo.insert(t.clone(), v.clone());
        Ok(v)
    }

    pub fn accepts(&mut self, t: &Term) -> Result<bool> {
        Ok(self.configs(t)?.iter().any(|c| self.a.is_final(c.state)))
    }
}

/// Shape of a memory with labels erased.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MemShape {
    BotLeaf,
    ConstLeaf,
    Node(Box<MemShape>, Box<MemShape>),
}

impl MemShape {
    pub fn of_memory(m: &Term) -> MemShape {
        if m.arity() == 0 {
            if m.is_bot() {
                MemShape::BotLeaf
            } else {
                MemShape::ConstLeaf
            }
        } else {
            MemShape::Node(
                Box::new(MemShape::of_memory(m.kid(0))),
                Box::new(MemShape::of_memory(m.kid(1))),
            )
        }
    }

    pub fn size(&self) -> usize {
        match self {
            MemShape::Node(l, r) => 1 + l.size() + r.size(),
            _ => 1,
        }
    }

    fn component(&self, k: usize) -> Option<MemShape> {
        match self {
            MemShape::BotLeaf => Some(MemShape::BotLeaf),
            MemShape::ConstLeaf => None,
            MemShape::Node(l, r) => Some(if k == 0 { (**l).clone() } else { (**r).clone() }),
        }
    }
}

/// Shape of every memory reachable on `t`; `None` means every run is stuck.
pub fn memory_shape(p: &PartitionedSignature, t: &Term) -> Option<MemShape> {
    let sym = p.index_of(t.sym())?;
    let cat = p.category(sym);
    if t.arity() == 0 {
        return match cat {
            Category::Int0 => Some(MemShape::BotLeaf),
            Category::Push => Some(MemShape::ConstLeaf),
            _ => None,
        };
    }
    let s1 = memory_shape(p, t.kid(0))?;
    let s2 = memory_shape(p, t.kid(1))?;
    match cat {
        Category::Push => Some(MemShape::Node(Box::new(s1), Box::new(s2))),
        Category::Int1 | Category::Cint1 | Category::Bt1 => Some(s1),
        Category::Int2 | Category::Cint2 | Category::Bt2 => Some(s2),
        Category::Pop11 => s1.component(0),
        Category::Pop12 => s1.component(1),
        Category::Pop21 => s2.component(0),
        Category::Pop22 => s2.component(1),
        Category::Int0 => None,
    }
}

/// Shape equality with all leaves identified.
pub fn struct_eq(m1: &MemShape, m2: &MemShape) -> bool {
    match (m1, m2) {
        (MemShape::Node(a, b), MemShape::Node(c, d)) => struct_eq(a, c) && struct_eq(b, d),
        (MemShape::Node(..), _) | (_, MemShape::Node(..)) => false,
        _ => true,
    }
}

/// `struct_eq` read directly off two memory terms.
pub fn term_struct_eq(m1: &Term, m2: &Term) -> bool {
    match (m1.arity(), m2.arity()) {
        (0, 0) => true,
        (2, 2) => term_struct_eq(m1.kid(0), m2.kid(0)) && term_struct_eq(m1.kid(1), m2.kid(1)),
        _ => false,
    }
}

/// Top of a memory in the reachability abstraction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Top {
    Bot,
    Sym(usize),
}

/// Over-approximation of the `(state, memory top)` pairs reachable by some term.
#[derive(Debug, Clone, Default)]
pub struct TopReach {
    pub tops: BTreeMap<usize, BTreeSet<Top>>,
    /// Tops that can sit under a given binary memory symbol, per component.
    pub under: BTreeMap<(usize, usize), BTreeSet<Top>>,
}

impl TopReach {
    pub fn states(&self) -> impl Iterator<Item = usize> + '_ {
        self.tops.keys().copied()
    }

    pub fn tops_of(&self, q: usize) -> impl Iterator<Item = Top> + '_ {
        self.tops.get(&q).into_iter().flatten().copied()
    }

    fn add(&mut self, q: usize, t: Top) -> bool {
        self.tops.entry(q).or_default().insert(t)
    }
}

/// Guards are ignored, so the result covers every run.
pub fn top_reach(a: &Vtam) -> TopReach {
    let mut k = TopReach::default();
    loop {
        let mut changed = false;
        for r in &a.rules {
            if r.left.is_empty() {
                match r.action {
                    Action::EmitBot => changed |= k.add(r.target, Top::Bot),
                    Action::PushConst(c) => changed |= k.add(r.target, Top::Sym(c)),
                    _ => {}
                }
                continue;
            }
            let t1: Vec<Top> = k.tops_of(r.left[0]).collect();
            let t2: Vec<Top> = k.tops_of(r.left[1]).collect();
            if t1.is_empty() || t2.is_empty() {
                continue;
            }
            let cat = a.sigma.category(r.symbol);
            let mut new = Vec::new();
            match r.action {
                Action::PushWith(h) => {
                    new.push(Top::Sym(h));
                    for &t in &t1 {
                        changed |= k.under.entry((h, 0)).or_default().insert(t);
                    }
                    for &t in &t2 {
                        changed |= k.under.entry((h, 1)).or_default().insert(t);
                    }
                }
                Action::KeepLeft => new.extend(&t1),
                Action::KeepRight => new.extend(&t2),
                Action::PopBottom => {
                    let src = if cat.popped_child() == Some(1) {
                        &t2
                    } else {
                        &t1
                    };
                    if src.contains(&Top::Bot) {
                        new.push(Top::Bot);
                    }
                }
                act => {
                    if let (Some(h), Some(comp)) = (act.popped_symbol(), act.taken_component()) {
                        let src = if cat.popped_child() == Some(1) {
                            &t2
                        } else {
                            &t1
                        };
                        if src.contains(&Top::Sym(h)) {
                            new.extend(k.under.get(&(h, comp)).into_iter().flatten().copied());
                        }
                    }
                }
            }
            for t in new {
                changed |= k.add(r.target, t);
            }
        }
        if !changed {
            return k;
        }
    }
}

/// Adds a trash state and the missing rules so every term that is not stuck
/// by its shape reaches some state. Returns the input unchanged when nothing
/// is missing.
pub fn complete(a: &Vtam) -> Result<Vtam> {
    a.validate()?;
    let mut out = a.clone();
    let mut trash: Option<usize> = None;
    loop {
        let reach = top_reach(&out);
        let missing = missing_rules(&out, &reach);
        if missing.is_empty() {
            return Ok(out);
        }
        let qt = match trash {
            Some(q) => q,
            None => {
                let q = out.add_fresh_state("q_trash");
                trash = Some(q);
                q
            }
        };
        for m in missing {
            let rule = match m {
                Missing::Leaf(sym) => {
                    let action = if out.sigma.category(sym) == Category::Push {
                        Action::PushConst(memory_symbol(&mut out, 0))
                    } else {
                        Action::EmitBot
                    };
                    Rule::constant(sym, action, qt)
                }
                Missing::Pair(sym, q1, q2, guard, top) => {
                    let cat = out.sigma.category(sym);
                    let action = match cat {
                        Category::Push => Action::PushWith(memory_symbol(&mut out, 2)),
                        c if c.is_pop() => match top {
                            Some(Top::Sym(h)) => Action::pop_for(c, h).unwrap(),
                            _ => Action::PopBottom,
                        },
                        c => Action::keep(c.kept_child().unwrap()),
                    };
                    Rule::binary(sym, q1, q2, guard, action, qt)
                }
            };
            out.add_rule(rule);
        }
    }
}

fn memory_symbol(a: &mut Vtam, arity: usize) -> usize {
    if let Some(i) = a.gamma.decls().iter().position(|d| d.arity == arity) {
        return i;
    }
    let name = a
        .gamma
        .fresh_name(if arity == 0 { "k_trash" } else { "h_trash" });
    a.gamma
        .add(SymbolDecl::new(name, arity))
        .expect("fresh name")
}

enum Missing {
    Leaf(usize),
    Pair(usize, usize, usize, Guard, Option<Top>),
}

fn missing_rules(a: &Vtam, reach: &TopReach) -> Vec<Missing> {
    let mut have_leaf = HashSet::new();
    let mut have_pair: HashSet<(usize, usize, usize)> = HashSet::new();
    let mut have_guard: HashSet<(usize, usize, usize, Guard)> = HashSet::new();
    let mut have_pop: HashSet<(usize, usize, usize, Top)> = HashSet::new();
    for r in &a.rules {
        if r.left.is_empty() {
            have_leaf.insert(r.symbol);
            continue;
        }
        let key = (r.symbol, r.left[0], r.left[1]);
        have_pair.insert(key);
        have_guard.insert((key.0, key.1, key.2, r.guard));
        match r.action {
            Action::PopBottom => {
                have_pop.insert((key.0, key.1, key.2, Top::Bot));
            }
            act => {
                if let Some(h) = act.popped_symbol() {
                    have_pop.insert((key.0, key.1, key.2, Top::Sym(h)));
                }
            }
        }
    }
    let states: Vec<usize> = reach.states().collect();
    let mut out = Vec::new();
    for (sym, _, arity, cat) in a.sigma.iter() {
        if arity == 0 {
            if !have_leaf.contains(&sym) {
                out.push(Missing::Leaf(sym));
            }
            continue;
        }
        for &q1 in &states {
            for &q2 in &states {
                if cat.is_cint() || cat.is_bt() {
                    let pos = if cat.is_cint() {
                        Guard::RelPos
                    } else {
                        Guard::BtEq
                    };
                    for g in [pos, pos.negated()] {
                        if !have_guard.contains(&(sym, q1, q2, g)) {
                            out.push(Missing::Pair(sym, q1, q2, g, None));
                        }
                    }
                } else if cat.is_pop() {
                    let popped = if cat.popped_child() == Some(0) {
                        q1
                    } else {
                        q2
                    };
                    for top in reach.tops_of(popped) {
                        let poppable = match top {
                            Top::Bot => true,
                            Top::Sym(h) => a.gamma.decls()[h].arity == 2,
                        };
                        if poppable && !have_pop.contains(&(sym, q1, q2, top)) {
                            out.push(Missing::Pair(sym, q1, q2, Guard::None, Some(top)));
                        }
                    }
                } else if !have_pair.contains(&(sym, q1, q2)) {
                    out.push(Missing::Pair(sym, q1, q2, Guard::None, None));
                }
            }
        }
    }
    out
}

/// Per-category uniqueness of left-hand sides.
pub fn is_deterministic(a: &Vtam) -> bool {
    let mut leaf: HashMap<usize, usize> = HashMap::new();
    let mut plain: HashMap<(usize, usize, usize), usize> = HashMap::new();
    let mut pop: HashMap<(usize, usize, usize, Top), usize> = HashMap::new();
    let mut guarded: HashMap<(usize, usize, usize), Vec<Guard>> = HashMap::new();
    for r in &a.rules {
        if r.left.is_empty() {
            *leaf.entry(r.symbol).or_default() += 1;
            continue;
        }
        let key = (r.symbol, r.left[0], r.left[1]);
        let cat = a.sigma.category(r.symbol);
        if cat.is_cint() || cat.is_bt() {
            guarded.entry(key).or_default().push(r.guard);
        } else if cat.is_pop() {
            let top = r.action.popped_symbol().map(Top::Sym).unwrap_or(Top::Bot);
            *pop.entry((key.0, key.1, key.2, top)).or_default() += 1;
        } else {
            *plain.entry(key).or_default() += 1;
        }
    }
    leaf.values().all(|&n| n <= 1)
        && plain.values().all(|&n| n <= 1)
        && pop.values().all(|&n| n <= 1)
        && guarded.values().all(|gs| {
            gs.len() <= 1 || (gs.len() == 2 && gs[0] == gs[1].negated() && gs[0] != gs[1])
        })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::format::parse_vtam;

    const BALANCED: &str = "vtam balanced
relation struct
sigma { int0: a/0 g0/0 ; cint1: g1/2 ; push: g2/2 }
gamma { f/2 }
states { q q0 qf }
final { qf }
rules {
  a -> qf(bot) ;
  g0 -> q0(bot) ;
  g1(qf(y1), qf(y2)) -[eq]-> q(y1) ;
  g2(q(y1), q0(y2)) -> qf(f(y1,y2)) ;
}";

    fn t(s: &str) -> Term {
        crate::term::parse_term_free(s).unwrap()
    }

    #[test]
    fn balanced_is_valid_and_runs() {
        let a = parse_vtam(BALANCED).unwrap();
        a.validate().unwrap();
        let qf = a.state_index("qf").unwrap();
        let root = a.all_root_configs(&t("a"), 100).unwrap();
        assert_eq!(
            root.into_iter().collect::<Vec<_>>(),
            vec![Configuration {
                state: qf,
                memory: Term::bot()
            }]
        );
        let g = t("g2(g1(a,a),g0)");
        let cs = a.all_root_configs(&g, 100).unwrap();
        assert!(cs.contains(&Configuration {
            state: qf,
            memory: t("f(bot,bot)")
        }));
        assert!(a.accepts_by_runs(&t("a")).unwrap());
        assert!(!a
            .accepts_by_runs(&t("g2(g1(g2(g1(a,a),g0),a),g0)"))
            .unwrap());
    }

    #[test]
    fn visibility_and_relation_errors() {
        let bad = "vtam x relation none sigma { int1: i/2 ; int0: a/0 } gamma { h/2 } states { q } final { q }
                   rules { a -> q(bot) ; i(q(y1), q(y2)) -> q(h(y1,y2)) ; }";
        let err = parse_vtam(bad).unwrap().validate().unwrap_err();
        assert!(err.to_string().contains("visibility violated"), "{err}");
        let cint = "vtam x relation none sigma { cint1: c/2 ; int0: a/0 } gamma { } states { q } final { q }
                    rules { a -> q(bot) ; c(q(y1), q(y2)) -[eq]-> q(y1) ; }";
        assert!(parse_vtam(cint).unwrap().validate().is_err());
    }

    #[test]
    fn step_root_examples() {
        let src = "vtam x relation none sigma { push: f/2 ; pop11: g/2 ; int0: a/0 ; push: c/0 } gamma { h/2 k/0 }
                   states { q q1 q2 } final { q }
                   rules { f(q1(y1), q2(y2)) -> q(h(y1,y2)) ; g(q1(h(y11,y12)), q2(y2)) -> q(y11) ; }";
        let a = parse_vtam(src).unwrap();
        a.validate().unwrap();
        let (q, q1, q2) = (0, 1, 2);
        let f = a.symbol_index("f").unwrap();
        let g = a.symbol_index("g").unwrap();
        let bot = |s| {
            (
                Configuration {
                    state: s,
                    memory: Term::bot(),
                },
                t("a"),
            )
        };
        let out = step_root(&a, f, &[bot(q1), bot(q2)]);
        assert_eq!(
            out.into_iter().collect::<Vec<_>>(),
            vec![Configuration {
                state: q,
                memory: t("h(bot,bot)")
            }]
        );
        let m = (
            Configuration {
                state: q1,
                memory: t("h(k,bot)"),
            },
            t("a"),
        );
        let out = step_root(&a, g, &[m, bot(q2)]);
        assert_eq!(
            out.into_iter().collect::<Vec<_>>(),
            vec![Configuration {
                state: q,
                memory: t("k")
            }]
        );
        let stuck = (
            Configuration {
                state: q1,
                memory: t("k"),
            },
            t("c"),
        );
        assert!(step_root(&a, g, &[stuck, bot(q2)]).is_empty());
    }

    #[test]
    fn shapes() {
        let p = PartitionedSignature::from_pairs(&[
            ("a", 0, Category::Int0),
            ("g0", 0, Category::Int0),
            ("g1", 2, Category::Int1),
            ("g2", 2, Category::Push),
            ("p", 2, Category::Pop11),
            ("c", 0, Category::Push),
        ])
        .unwrap();
        assert_eq!(memory_shape(&p, &t("a")), Some(MemShape::BotLeaf));
        assert_eq!(
            memory_shape(&p, &t("g2(g1(a,a),g0)")),
            Some(MemShape::Node(
                Box::new(MemShape::BotLeaf),
                Box::new(MemShape::BotLeaf)
            ))
        );
        assert_eq!(memory_shape(&p, &t("p(a,a)")), Some(MemShape::BotLeaf));
        assert_eq!(memory_shape(&p, &t("p(c,a)")), None);
        assert!(struct_eq(&MemShape::BotLeaf, &MemShape::ConstLeaf));
        let n = MemShape::Node(Box::new(MemShape::BotLeaf), Box::new(MemShape::BotLeaf));
        assert!(!struct_eq(&n, &MemShape::BotLeaf));
    }

    #[test]
    fn determinism_conditions() {
        let two = "vtam x relation none sigma { int0: a/0 } gamma { } states { q r } final { q }
                   rules { a -> q(bot) ; a -> r(bot) ; }";
        assert!(!parse_vtam(two).unwrap().is_deterministic());
        let signs = "vtam x relation struct sigma { int0: a/0 ; cint1: c/2 } gamma { } states { q r } final { q }
                     rules { a -> q(bot) ; c(q(y1), q(y2)) -[eq]-> q(y1) ; c(q(y1), q(y2)) -[neq]-> r(y1) ; }";
        assert!(parse_vtam(signs).unwrap().is_deterministic());
        let pops = "vtam x relation none sigma { int0: a/0 ; pop11: p/2 } gamma { h/2 k/2 } states { q r } final { q }
                    rules { a -> q(bot) ; p(q(h(y11,y12)), q(y2)) -> q(y11) ; p(q(k(y11,y12)), q(y2)) -> r(y11) ; }";
        assert!(parse_vtam(pops).unwrap().is_deterministic());
    }

    #[test]
    fn completion_adds_trash() {
        let src = "vtam x relation struct sigma { int0: a/0 b/0 ; cint1: c/2 } gamma { } states { q } final { q }
                   rules { a -> q(bot) ; c(q(y1), q(y2)) -[eq]-> q(y1) ; }";
        let a = parse_vtam(src).unwrap();
        let c = complete(&a).unwrap();
        c.validate().unwrap();
        let trash = c.state_index("q_trash").unwrap();
        let b = c.symbol_index("b").unwrap();
        let cs = c.symbol_index("c").unwrap();
        assert!(c.rules.contains(&Rule::constant(b, Action::EmitBot, trash)));
        assert!(c.rules.contains(&Rule::binary(
            cs,
            0,
            0,
            Guard::RelNeg,
            Action::KeepLeft,
            trash
        )));
        assert_eq!(c.states.len(), 2);
        assert!(complete(&c).unwrap() == c);
    }
}
