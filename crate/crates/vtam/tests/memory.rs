mod common;

use std::collections::BTreeSet;

use common::{random_vtam, reference_memories, rng, Gen};
use vtam::decide::{eliminate_negative, memory_languages};
use vtam::oracle::memory_terms;
use vtam::{brute_memory_bounded, Relation, Term};

fn check_population(relation: Relation, seeds: std::ops::Range<u64>, cap: usize) {
    let g = Gen::new(relation);
    for seed in seeds {
        let a = random_vtam(&mut rng(seed), &g);
        let m = memory_languages(&a).unwrap();
        let all = memory_terms(&a.gamma, cap).unwrap();
        for q in 0..a.states.len() {
            let ta = m.of(q);
            let got: BTreeSet<Term> = all.iter().filter(|t| ta.accepts(t)).cloned().collect();
            let want = reference_memories(&a, q, cap, &got);
            assert_eq!(
                got,
                want,
                "seed {seed}, state {}\n{}",
                a.states[q],
                vtam::print_vtam(&a)
            );
        }
    }
}

#[test]
fn extraction_matches_oracle_unconstrained() {
    check_population(Relation::None, 0..40, 7);
}

#[test]
fn extraction_matches_oracle_struct_positive() {
    check_population(Relation::StructEq, 100..140, 7);
}

#[test]
fn extraction_matches_oracle_syn_positive() {
    check_population(Relation::SynEq, 200..240, 7);
}

#[test]
fn elimination_preserves_memory_languages() {
    for relation in [Relation::StructEq, Relation::SynEq] {
        let mut g = Gen::new(relation);
        g.negative = true;
        for seed in 300..330 {
            let a = random_vtam(&mut rng(seed), &g);
            let e = eliminate_negative(&a).unwrap();
            assert!(!e.has_guard(|g| g == vtam::Guard::RelNeg));
            let before = brute_memory_bounded(&a, 10).unwrap();
            let after = brute_memory_bounded(&e, 10).unwrap();
            for q in 0..a.states.len() {
                let small = |s: &BTreeSet<Term>| {
                    s.iter()
                        .filter(|m| m.size() <= 6)
                        .cloned()
                        .collect::<BTreeSet<_>>()
                };
                assert_eq!(
                    small(&before[q]),
                    small(&after[q]),
                    "seed {seed} state {q}\n{}",
                    vtam::print_vtam(&a)
                );
            }
        }
    }
}
