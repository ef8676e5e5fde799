use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use scheme_forge::classify::{classify_scheme, oracle_enumerate};
use scheme_forge::digraph::profile;
use scheme_forge::generators::{catalog, circulant_digraph, enumerate_circulant, EnumerateOptions};
use scheme_forge::scheme::{build_scheme, verify_identities};

fn bench_build(c: &mut Criterion) {
    let mut group = c.benchmark_group("build_scheme");
    for expr in [
        "paley_tournament(7)",
        "paley_tournament(43)",
        "wreath(thin_cyclic(3),one_class(16))",
        "lex_blowup(paley_tournament(19),8)",
    ] {
        let s = catalog(expr).unwrap();
        let rels: Vec<Vec<(usize, usize)>> = (1..=s.d()).map(|i| s.pairs(i).collect()).collect();
        group.bench_with_input(BenchmarkId::from_parameter(expr), &rels, |b, rels| {
            b.iter(|| build_scheme(s.size(), black_box(rels)).unwrap())
        });
    }
    group.finish();
}

fn bench_identities(c: &mut Criterion) {
    let s = catalog("lex_blowup(paley_tournament(19),8)").unwrap();
    c.bench_function("verify_identities/lex_blowup(paley19,8)", |b| {
        b.iter(|| verify_identities(black_box(&s)).unwrap())
    });
}

fn bench_classify(c: &mut Criterion) {
    let mut group = c.benchmark_group("classify");
    for expr in [
        "thin_cyclic(4)",
        "wreath(thin_cyclic(3),one_class(4))",
        "paley_tournament(43)",
    ] {
        let s = catalog(expr).unwrap();
        group.bench_with_input(BenchmarkId::new("classifier", expr), &s, |b, s| {
            b.iter(|| classify_scheme(black_box(s)))
        });
        group.bench_with_input(BenchmarkId::new("oracle", expr), &s, |b, s| {
            b.iter(|| oracle_enumerate(black_box(s)).unwrap())
        });
    }
    group.finish();
}

fn bench_distances(c: &mut Criterion) {
    let g = circulant_digraph(512, &[1, 5, 17, 100]);
    c.bench_function("profile/circulant512", |b| {
        b.iter(|| profile(black_box(&g)))
    });
}

fn bench_enumerate(c: &mut Criterion) {
    let mut group = c.benchmark_group("enumerate_circulant");
    group.sample_size(10);
    for n in [8, 12, 16] {
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| {
            b.iter(|| {
                enumerate_circulant(n, &EnumerateOptions::default())
                    .unwrap()
                    .count()
            })
        });
    }
    group.finish();
}

criterion_group!(
    benches,
    bench_build,
    bench_identities,
    bench_classify,
    bench_distances,
    bench_enumerate
);
criterion_main!(benches);
