//! Brute-force reference semantics used by the differential tests.

use std::collections::{BTreeSet, HashSet, VecDeque};

use crate::error::{Error, Result};
use crate::model::{apply_rule, Action, Configuration, Guard, Runner, Vtam, DEFAULT_RUN_BUDGET};
use crate::term::{Signature, Term};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnumBudget {
    pub max_size: usize,
    pub max_count: usize,
}

impl EnumBudget {
    pub fn size(max_size: usize) -> EnumBudget {
        EnumBudget {
            max_size,
            max_count: usize::MAX,
        }
    }
}

/// Terms grouped by size: `out[n]` holds every term of size `n`, sorted by
/// print string. Index 0 is always empty.
pub fn terms_by_size(sig: &Signature, max_size: usize) -> Result<Vec<Vec<Term>>> {
    let consts: Vec<&str> = sig
        .decls()
        .iter()
        .filter(|d| d.arity == 0)
        .map(|d| d.name.as_str())
        .collect();
    if consts.is_empty() {
        return Err(Error::Signature(
            "no constants: the set of ground terms is empty".into(),
        ));
    }
    let mut by: Vec<Vec<Term>> = vec![Vec::new(); max_size + 1];
    let mut strings: Vec<Vec<String>> = vec![Vec::new(); max_size + 1];
    for n in 1..=max_size {
        let mut bucket: Vec<(String, Term)> = Vec::new();
        if n == 1 {
            for &c in &consts {
                bucket.push((c.to_string(), Term::leaf(c)));
            }
        }
        for d in sig.decls() {
            match d.arity {
                0 => {}
                ar if n > ar => {
                    // Distribute n-1 symbols over ar children.
                    let mut parts = vec![1usize; ar];
                    compositions(n - 1, ar, &mut parts, 0, &mut |sizes: &[usize]| {
                        product(
                            &by,
                            &strings,
                            sizes,
                            &mut |kids: Vec<Term>, ks: Vec<&String>| {
                                let mut s = String::with_capacity(n * 4);
                                s.push_str(&d.name);
                                s.push('(');
                                for (i, k) in ks.iter().enumerate() {
                                    if i > 0 {
                                        s.push(',');
                                    }
                                    s.push_str(k);
                                }
                                s.push(')');
                                bucket.push((s, Term::app(d.name.as_str(), kids)));
                            },
                        );
                    });
                }
                _ => {}
            }
        }
        bucket.sort_by(|a, b| a.0.cmp(&b.0));
        strings[n] = bucket.iter().map(|(s, _)| s.clone()).collect();
        by[n] = bucket.into_iter().map(|(_, t)| t).collect();
    }
    Ok(by)
}

fn compositions(
    total: usize,
    k: usize,
    parts: &mut Vec<usize>,
    i: usize,
    f: &mut dyn FnMut(&[usize]),
) {
    if k == 0 {
        return;
    }
    if i == k - 1 {
        if total >= 1 {
            parts[i] = total;
            f(parts);
        }
        return;
    }
    for s in 1..total {
        parts[i] = s;
        compositions(total - s, k, parts, i + 1, f);
    }
}

fn product(
    by: &[Vec<Term>],
    strings: &[Vec<String>],
    sizes: &[usize],
    f: &mut dyn FnMut(Vec<Term>, Vec<&String>),
) {
    fn go<'s>(
        by: &[Vec<Term>],
        strings: &'s [Vec<String>],
        sizes: &[usize],
        acc: &mut Vec<(usize, usize)>,
        f: &mut dyn FnMut(Vec<Term>, Vec<&'s String>),
    ) {
        if acc.len() == sizes.len() {
            let kids = acc.iter().map(|&(n, i)| by[n][i].clone()).collect();
            let ks = acc.iter().map(|&(n, i)| &strings[n][i]).collect();
            f(kids, ks);
            return;
        }
        let n = sizes[acc.len()];
        for i in 0..by[n].len() {
            acc.push((n, i));
            go(by, strings, sizes, acc, f);
            acc.pop();
        }
    }
    go(by, strings, sizes, &mut Vec::new(), f);
}

/// All ground terms within the budget, size first, then print order.
pub fn enumerate_terms(sig: &Signature, b: EnumBudget) -> Result<Vec<Term>> {
    let by = terms_by_size(sig, b.max_size)?;
    Ok(by.into_iter().flatten().take(b.max_count).collect())
}

pub fn brute_accepts(a: &Vtam, t: &Term) -> Result<bool> {
    a.accepts_by_runs(t)
}

/// Memories reached in `q` over every enumerated input term.
pub fn brute_memory(a: &Vtam, q: usize, b: EnumBudget) -> Result<BTreeSet<Term>> {
    let mut run = Runner::new(a);
    let mut out = BTreeSet::new();
    for t in enumerate_terms(a.sigma.base(), b)? {
        for c in run.configs(&t)?.iter() {
            if c.state == q {
                out.insert(c.memory.clone());
            }
        }
    }
    Ok(out)
}

/// Every configuration `q(m)` reachable by some input term through runs
/// whose memories never exceed `max_mem` symbols, per state. Children of a
/// node are independent, so pairs of reachable configurations combine
/// freely. BT guards are not supported here.
pub fn brute_memory_bounded(a: &Vtam, max_mem: usize) -> Result<Vec<BTreeSet<Term>>> {
    if a.has_bt() {
        return Err(Error::Unsupported(
            "input-term constraints need actual input terms".into(),
        ));
    }
    let n = a.states.len();
    let mut mems: Vec<BTreeSet<Term>> = vec![BTreeSet::new(); n];
    let mut queue: VecDeque<(usize, Term)> = VecDeque::new();
    let mut by_left: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    for (ri, r) in a.rules.iter().enumerate() {
        if r.left.is_empty() {
            if let Some(m) = apply_rule(a, r, &[]) {
                queue.push_back((r.target, m));
            }
            continue;
        }
        by_left[r.left[0]].push((ri, 0));
        by_left[r.left[1]].push((ri, 1));
    }
    let dummy = Term::bot();
    let mut count = 0usize;
    while let Some((q, m)) = queue.pop_front() {
        if m.size() > max_mem || !mems[q].insert(m.clone()) {
            continue;
        }
        count += 1;
        if count > DEFAULT_RUN_BUDGET {
            return Err(Error::Budget(format!(
                "more than {DEFAULT_RUN_BUDGET} bounded configurations"
            )));
        }
        for &(ri, side) in &by_left[q] {
            let r = &a.rules[ri];
            let other = r.left[1 - side];
            let popped = a.sigma.category(r.symbol).popped_child();
            // When the result ignores the partner memory, one fitting partner suffices.
            let independent = match r.action {
                Action::KeepLeft => side == 0,
                Action::KeepRight => side == 1,
                Action::PushWith(_) | Action::PushConst(_) | Action::EmitBot => false,
                _ => popped == Some(side),
            };
            let related = |o: &Term| {
                let (m1, m2) = if side == 0 { (&m, o) } else { (o, &m) };
                a.relation.holds(m1, m2)
            };
            let partners: Vec<Term> = if independent {
                match r.guard {
                    Guard::RelPos => mems[other]
                        .iter()
                        .find(|o| related(o))
                        .cloned()
                        .into_iter()
                        .collect(),
                    Guard::RelNeg => mems[other]
                        .iter()
                        .find(|o| !related(o))
                        .cloned()
                        .into_iter()
                        .collect(),
                    _ => mems[other].iter().next().cloned().into_iter().collect(),
                }
            } else {
                mems[other].iter().cloned().collect()
            };
            for o in partners {
                let (m1, m2) = if side == 0 {
                    (m.clone(), o)
                } else {
                    (o, m.clone())
                };
                let c1 = Configuration {
                    state: r.left[0],
                    memory: m1,
                };
                let c2 = Configuration {
                    state: r.left[1],
                    memory: m2,
                };
                if let Some(res) = apply_rule(a, r, &[(&c1, &dummy), (&c2, &dummy)]) {
                    if res.size() <= max_mem && !mems[r.target].contains(&res) {
                        queue.push_back((r.target, res));
                    }
                }
            }
        }
    }
    Ok(mems)
}

/// Terms of `sig` up to `max_size` accepted by `a`, size first.
pub fn accepted_terms(a: &Vtam, max_size: usize) -> Result<Vec<Term>> {
    let mut run = Runner::new(a);
    let mut out = Vec::new();
    for t in enumerate_terms(a.sigma.base(), EnumBudget::size(max_size))? {
        if run.accepts(&t)? {
            out.push(t);
        }
    }
    Ok(out)
}

/// Memory terms over `gamma` (with `bot`) up to a size, for TA comparisons.
pub fn memory_terms(gamma: &Signature, max_size: usize) -> Result<Vec<Term>> {
    enumerate_terms(&gamma.with_bot(), EnumBudget::size(max_size))
}

/// Distinct elements, used to keep test fixtures duplicate-free.
pub fn distinct(ts: &[Term]) -> bool {
    ts.iter().collect::<HashSet<_>>().len() == ts.len()
}
