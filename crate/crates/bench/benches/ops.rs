use criterion::{black_box, criterion_group, criterion_main, Criterion};
use vtam::encodings::powerlist_term;
use vtam::{
    build_example, complement, determinize, encode_3sat, intersection, is_empty, member,
    memory_languages, saturate, witness, Cnf, SaturationOptions,
};

fn constructions(c: &mut Criterion) {
    for name in ["balanced", "redblack", "powerlist"] {
        let (a, _) = build_example(name).unwrap();
        c.bench_function(&format!("det/{name}"), |b| {
            b.iter(|| determinize(black_box(&a)).unwrap())
        });
        c.bench_function(&format!("complement/{name}"), |b| {
            b.iter(|| complement(black_box(&a)).unwrap())
        });
    }
    let (a, _) = build_example("redblack").unwrap();
    let na = complement(&a).unwrap();
    c.bench_function("intersection/redblack-not-redblack", |b| {
        b.iter(|| intersection(&a, &na).unwrap())
    });
}

fn decisions(c: &mut Criterion) {
    for name in ["balanced", "redblack", "powerlist"] {
        let (a, _) = build_example(name).unwrap();
        c.bench_function(&format!("saturate/{name}"), |b| {
            b.iter(|| saturate(black_box(&a), SaturationOptions::default()).unwrap())
        });
        c.bench_function(&format!("memlang/{name}"), |b| {
            b.iter(|| memory_languages(black_box(&a)).unwrap())
        });
        c.bench_function(&format!("empty/{name}"), |b| {
            b.iter(|| is_empty(black_box(&a)).unwrap())
        });
        c.bench_function(&format!("witness/{name}"), |b| {
            b.iter(|| witness(black_box(&a)).unwrap())
        });
    }
    let (a, _) = build_example("redblack").unwrap();
    let na = complement(&a).unwrap();
    let diff = intersection(&a, &na).unwrap();
    c.bench_function("empty/redblack-minus-itself", |b| {
        b.iter(|| is_empty(black_box(&diff)).unwrap())
    });

    let (p, ptr) = build_example("powerlist").unwrap();
    let t = ptr
        .translate_term(&powerlist_term(&[1, 2, 3, 4, 5, 6, 7, 8]))
        .unwrap();
    c.bench_function("member/powerlist-8", |b| {
        b.iter(|| member(&p, black_box(&t)).unwrap())
    });
}

fn sat3(c: &mut Criterion) {
    let clauses: Vec<Vec<i32>> = (0..24)
        .map(|i| {
            let v = |k: i32| (i * 7 + k * 5) % 10 + 1;
            let s = |k: i32| if (i * 3 + k) % 2 == 0 { 1 } else { -1 };
            vec![s(0) * v(0), s(1) * v(1), s(2) * v(2)]
        })
        .collect();
    let cnf = Cnf::new(10, clauses).unwrap();
    let (t, a) = encode_3sat(&cnf).unwrap();
    c.bench_function("member/3sat-10-vars-24-clauses", |b| {
        b.iter(|| member(&a, black_box(&t)).unwrap())
    });
}

criterion_group!(benches, constructions, decisions, sat3);
criterion_main!(benches);
