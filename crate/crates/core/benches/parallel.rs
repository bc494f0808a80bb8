//! Sequential against parallel execution on the oracle runs and the bounded beta search.

use std::collections::BTreeSet;
use std::path::Path;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use ebltl::dsl::parse_formula;
use ebltl::exec::Exec;
use ebltl::oracle::{cross_validate, load_corpus, random_differential, OracleBounds};
use ebltl::preserve::{check_beta_dependent_with, BetaBounds};
use ebltl::sem::Limits;

const MODES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn random_pairs(c: &mut Criterion) {
    let mut group = c.benchmark_group("random_differential_100");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| random_differential(100, 2, OracleBounds::default(), exec))
        });
    }
    group.finish();
}

fn corpus_table(c: &mut Criterion) {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus");
    let entries: Vec<_> = load_corpus(&root).unwrap().into_iter().filter(|e| e.name == "vm").collect();
    let mut group = c.benchmark_group("cross_validate_vm");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| cross_validate(&entries, Limits::default(), OracleBounds::default(), exec).unwrap())
        });
    }
    group.finish();
}

fn beta_search(c: &mut Criterion) {
    // Holds under projection, so the whole bounded space is searched.
    let phi = parse_formula("F[a] | G !([a] | [b])").unwrap();
    let beta: BTreeSet<String> = ["a", "b"].map(String::from).into();
    let sigma: BTreeSet<String> = ["a", "b", "x", "y"].map(String::from).into();
    let mut group = c.benchmark_group("beta_search");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| check_beta_dependent_with(&phi, &beta, &sigma, BetaBounds::new(3, 3), exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, random_pairs, corpus_table, beta_search);
criterion_main!(benches);
