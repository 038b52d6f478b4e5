use criterion::{black_box, criterion_group, criterion_main, Criterion};
use kleene_core::adn::{adn_totalizer, empty_avoider, parity_psi};
use kleene_core::arslanov::{decide, parse_scenario};
use kleene_core::fixedpoint::{kleene_fixed_point, quine, transformer_corpus};
use kleene_core::kernel::{decode, encode, phi, w_enum_at};
use kleene_core::{Nat, Term};

fn codec(c: &mut Criterion) {
    let q = quine();
    let t = decode(&q);
    c.bench_function("encode quine", |b| b.iter(|| encode(black_box(&t))));
    c.bench_function("decode quine", |b| b.iter(|| decode(black_box(&q))));
}

fn evaluation(c: &mut Criterion) {
    let q = quine();
    c.bench_function("phi quine", |b| b.iter(|| phi(black_box(&q), 0u64, 1_000_000)));
    let (_, f) = transformer_corpus().into_iter().find(|(n, _)| *n == "const7").unwrap();
    c.bench_function("kleene fixed point const7", |b| b.iter(|| kleene_fixed_point(black_box(&f))));
    let e = kleene_fixed_point(&f);
    c.bench_function("phi fixed point const7", |b| b.iter(|| phi(black_box(&e), 0u64, 100_000)));
}

fn totalizer(c: &mut Criterion) {
    let bottom = encode(&Term::bottom());
    let t = adn_totalizer(&parity_psi(), &empty_avoider(&bottom));
    let f0 = t.at(&Nat::small(0));
    let f1 = t.at(&Nat::small(1));
    let mut g = c.benchmark_group("totalizer");
    g.sample_size(10);
    g.bench_function("W f(0) at 100", |b| b.iter(|| w_enum_at(black_box(&f0), 100, 20_100)));
    g.bench_function("delta f(1) at 1e6", |b| {
        b.iter(|| phi(&t.delta.code, black_box(f1.0.clone()), 1_000_000))
    });
    g.finish();
}

fn simulator(c: &mut Criterion) {
    let mut text = String::from("horizon 400\n");
    for s in (10..390).step_by(10) {
        text += &format!("A {} @{}\n", s / 10, s + 5);
        text += &format!("delta slot {} @{s} -> 42 use {}\n", s / 10, s / 10 + 1);
    }
    let sc = parse_scenario(&text).unwrap();
    c.bench_function("decide 400 stages", |b| b.iter(|| decide(black_box(&sc), 1)));
}

criterion_group!(benches, codec, evaluation, totalizer, simulator);
criterion_main!(benches);
