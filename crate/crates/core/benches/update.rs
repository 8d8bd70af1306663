use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use subconn::{gen, Execution, Oracle, OracleOptions};

fn updates(c: &mut Criterion) {
    let n = 20_000;
    let g = gen::random_off(gen::gnm(n, 3 * n, 7).unwrap(), n / 100, 7).unwrap();
    let mut oracle = Oracle::preprocess(&g, 32, OracleOptions::default()).unwrap();
    let mut group = c.benchmark_group("apply_update");
    for d in [4usize, 16, 32] {
        let sets: Vec<Vec<usize>> = {
            let mut rng = gen::rng(d as u64);
            (0..16)
                .map(|_| gen::random_subset(&mut rng, n, d))
                .collect()
        };
        for (name, exec) in [
            ("sequential", Execution::Sequential),
            ("parallel", Execution::Parallel),
        ] {
            oracle.set_execution(exec);
            let o = &oracle;
            let mut i = 0;
            group.bench_with_input(BenchmarkId::new(name, d), &d, |b, _| {
                b.iter(|| {
                    i = (i + 1) % sets.len();
                    o.apply_update(&sets[i]).unwrap()
                })
            });
        }
    }
    group.finish();
}

criterion_group!(benches, updates);
criterion_main!(benches);
