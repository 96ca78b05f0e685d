use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use mldlab::mld::{mld_at_origin, monomial_pair, MldConfig, PairSpec};
use mldlab::par::Execution;
use mldlab::scan::{run_scan, ScanOptions, ScanRecipe};
use mldlab::Rational;

fn pair(gens: &[&[u32]], p: i64, q: i64) -> PairSpec {
    monomial_pair(3, gens, Rational::new(p.into(), q.into())).unwrap()
}

fn lattice_enumeration(c: &mut Criterion) {
    let cases = [
        ("cusp", pair(&[&[2, 0, 0], &[0, 3, 0]], 1, 2)),
        ("mixed", pair(&[&[2, 0, 1], &[0, 3, 0], &[1, 1, 1]], 3, 4)),
        ("diagonal", pair(&[&[4, 0, 0], &[0, 5, 0], &[0, 0, 6]], 2, 3)),
    ];
    let mut group = c.benchmark_group("mld_at_origin");
    for (name, p) in &cases {
        for exec in [Execution::Sequential, Execution::Parallel] {
            let cfg = MldConfig::default().with_bound(48).with_execution(exec);
            group.bench_with_input(BenchmarkId::new(format!("{exec:?}"), name), p, |b, p| {
                b.iter(|| mld_at_origin(black_box(p), &cfg).unwrap())
            });
        }
    }
    group.finish();
}

fn scan_rows(c: &mut Criterion) {
    let recipe: ScanRecipe = serde_json::from_str(
        r#"{"params": {"i": [2, 17]}, "family": [{"gens": [[2, 0, 0], [0, "i", 0], [1, 1, "i"]], "exp": "1/2"}], "invariant": "mld"}"#,
    )
    .unwrap();
    let mut group = c.benchmark_group("scan");
    group.sample_size(10);
    for exec in [Execution::Sequential, Execution::Parallel] {
        group.bench_function(format!("{exec:?}"), |b| {
            b.iter(|| run_scan(black_box(&recipe), ScanOptions { execution: exec, timing: false }).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, lattice_enumeration, scan_rows);
criterion_main!(benches);
