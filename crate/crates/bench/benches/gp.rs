use criterion::{criterion_group, criterion_main, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::hint::black_box;

use rcjs_bench::desk_set;
use rcjs_core::gp::{crossover, fitness, init_population, mutate};
use rcjs_core::selector::{extract_features, parse_selector};

fn operators(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let pop = init_population(50, 7, &mut rng);
    c.bench_function("init_population_50", |b| {
        b.iter(|| black_box(init_population(50, 7, &mut rng)))
    });
    c.bench_function("crossover_depth7", |b| {
        b.iter(|| black_box(crossover(&pop[10].root, &pop[11].root, 7, &mut rng)))
    });
    c.bench_function("mutate_depth7", |b| {
        b.iter(|| black_box(mutate(&pop[11].root, 7, &mut rng)))
    });
}

fn evaluation(c: &mut Criterion) {
    let set = desk_set(4, 3, 100);
    let sel = parse_selector("(- (* W NSUC) (% DD PT))").unwrap();
    let features = extract_features(&set[0]);
    c.bench_function("priorities_42_jobs", |b| {
        b.iter(|| black_box(features.iter().map(|f| sel.evaluate(f)).sum::<f64>()))
    });
    let mut group = c.benchmark_group("fitness");
    group.sample_size(10);
    group.bench_function("3_instances_5k_nodes", |b| {
        b.iter(|| black_box(fitness(&sel, &set, 5_000).unwrap()))
    });
    group.finish();
}

criterion_group!(benches, operators, evaluation);
criterion_main!(benches);
