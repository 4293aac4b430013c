use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use egfrec::oracles::{a025166_term, registry_get, Registry, Seeds};
use egfrec::verifyflow::{run_derivation, verify_descriptor, Source};
use egfrec::{run_recurrence, series, BFileStore, ExpRationalEGF, FetchPolicy};

fn forward_run(c: &mut Criterion) {
    let desc = registry_get("A025166").unwrap();
    let rec = desc.recurrence.unwrap();
    let Seeds::Given(seeds) = desc.seeds else {
        unreachable!()
    };
    let mut group = c.benchmark_group("run_recurrence");
    group.sample_size(20);
    for last in [1000i64, 5000] {
        group.bench_with_input(BenchmarkId::from_parameter(last), &last, |b, &last| {
            b.iter(|| run_recurrence(&rec, &seeds, black_box(last)).unwrap())
        });
    }
    group.finish();
}

fn oracle(c: &mut Criterion) {
    let mut group = c.benchmark_group("a025166_term");
    group.sample_size(20);
    for n in [1000u64, 5000] {
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| {
            b.iter(|| a025166_term(black_box(n)).unwrap())
        });
    }
    group.finish();
}

fn series_expansion(c: &mut Criterion) {
    let egf = ExpRationalEGF::parse("-1/(1-2*x)", "-x/(1-2*x)").unwrap();
    c.bench_function("series/101", |b| {
        b.iter(|| series(&egf, black_box(101)).unwrap())
    });
}

fn derivation(c: &mut Criterion) {
    let registry = Registry::builtin();
    c.bench_function("run_derivation/A025166", |b| {
        b.iter(|| run_derivation(&registry, black_box("A025166")).unwrap())
    });
}

fn full_protocol(c: &mut Criterion) {
    let desc = registry_get("A025166").unwrap();
    let bfile = BFileStore::offline()
        .fetch("A025166", FetchPolicy::FixtureOnly)
        .unwrap();
    let sources = Source::all();
    let mut group = c.benchmark_group("verify_descriptor");
    group.sample_size(10);
    group.bench_function("A025166/5000", |b| {
        b.iter(|| verify_descriptor(&desc, Some(&bfile), black_box(5000), &sources).unwrap())
    });
    group.finish();
}

criterion_group!(
    benches,
    forward_run,
    oracle,
    series_expansion,
    derivation,
    full_protocol
);
criterion_main!(benches);
