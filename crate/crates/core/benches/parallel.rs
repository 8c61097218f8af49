//! Sequential against rayon-parallel execution. Build with
//! `--no-default-features` to measure the sequential fallback alone.

use std::hint::black_box;
use std::time::Duration;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use hk_core::decide::{decide, Options};
use hk_core::formula::parse;
use hk_core::limits::Limits;
use hk_core::oracle::{differential, random_sentences, CorpusConfig};
use hk_core::structure::enumerate;

fn modes() -> [(&'static str, bool); 2] {
    [("sequential", false), ("parallel", true)]
}

fn enumeration(c: &mut Criterion) {
    let mut group = c.benchmark_group("enumerate");
    for (k, m, l) in [(1usize, 12u64, 2usize), (2, 1, 2), (2, 2, 1)] {
        for (name, parallel) in modes() {
            let limits = Limits::default().with_parallel(parallel);
            group.bench_with_input(
                BenchmarkId::new(name, format!("{k}-{m}-{l}")),
                &limits,
                |b, limits| b.iter(|| enumerate(black_box(k), m, l, limits).unwrap().len()),
            );
        }
    }
    group.finish();
}

fn decision(c: &mut Criterion) {
    let mut group = c.benchmark_group("decide");
    let sentences = [
        (
            1,
            "forall x. ((exists w. w in x) -> exists y. (y in x & forall z. !(z in x & z in y)))",
        ),
        (
            2,
            "forall x0, x1, x2, x3. !(x0 in x1 & x1 in x2 & x2 in x3 & x3 = x0)",
        ),
    ];
    for (k, text) in sentences {
        let f = parse(text).unwrap();
        for (name, parallel) in modes() {
            let opts = Options {
                limits: Limits::default().with_parallel(parallel),
                ..Options::default()
            };
            group.bench_function(BenchmarkId::new(name, format!("k{k}")), |b| {
                b.iter(|| decide(k, black_box(&f), &opts).unwrap().value)
            });
        }
    }
    group.finish();
}

fn corpus(c: &mut Criterion) {
    let mut group = c.benchmark_group("differential");
    let sentences = random_sentences(&CorpusConfig::default());
    for (name, parallel) in modes() {
        let opts = Options {
            limits: Limits::default().with_parallel(parallel),
            ..Options::default()
        };
        group.bench_function(name, |b| {
            b.iter(|| differential(1, black_box(&sentences), &opts, None).passed())
        });
    }
    group.finish();
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10).measurement_time(Duration::from_secs(5));
    targets = enumeration, decision, corpus
}
criterion_main!(benches);
