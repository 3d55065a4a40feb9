use std::collections::BTreeSet;
use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use k3_cusps::codes;
use k3_cusps::par::Strategy;

const STRATEGIES: [(&str, Strategy); 2] = [("sequential", Strategy::Sequential), ("parallel", Strategy::Parallel)];

fn short_vectors(c: &mut Criterion) {
    let l = codes::reference_lattice().unwrap().lattice;
    let mut group = c.benchmark_group("short_vectors_rank18_bound2");
    group.sample_size(10);
    for (name, s) in STRATEGIES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &s, |b, &s| {
            b.iter(|| black_box(l.short_vectors_with(2, s).unwrap().len()))
        });
    }
    group.finish();
}

fn code_search(c: &mut Criterion) {
    let weights = BTreeSet::from([6, 9]);
    let mut group = c.benchmark_group("code_search_9_3");
    group.sample_size(10);
    for (name, s) in STRATEGIES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &s, |b, &s| {
            b.iter(|| black_box(codes::search_codes(9, 3, &weights, s).unwrap().len()))
        });
    }
    group.finish();
}

fn root_check(c: &mut Criterion) {
    let cl = codes::reference_lattice().unwrap();
    let mut group = c.benchmark_group("verify_no_extra_roots");
    group.sample_size(10);
    for (name, s) in STRATEGIES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &s, |b, &s| {
            b.iter(|| black_box(codes::verify_no_extra_roots(&cl.lattice, &cl.root_sublattice, s).unwrap()))
        });
    }
    group.finish();
}

criterion_group!(benches, short_vectors, code_search, root_check);
criterion_main!(benches);
