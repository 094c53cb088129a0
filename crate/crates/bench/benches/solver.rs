use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use rcjs_bench::desk_instance;
use rcjs_core::construct::single_pass_construct;
use rcjs_core::cp::propagate;
use rcjs_core::{solve, Model, Selector, SolverConfig};

fn root_propagation(c: &mut Criterion) {
    let mut group = c.benchmark_group("root_propagation");
    for machines in [2, 4, 8] {
        let model = Model::build(&desk_instance(machines, 1)).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(machines), &model, |b, model| {
            b.iter(|| {
                let mut store = model.root_store().unwrap();
                black_box(propagate(model, &mut store))
            })
        });
    }
    group.finish();
}

fn branch_and_bound(c: &mut Criterion) {
    let mut group = c.benchmark_group("solve_5k_nodes");
    group.sample_size(20);
    for machines in [2, 4] {
        let model = Model::build(&desk_instance(machines, 2)).unwrap();
        let config = SolverConfig::with_budget(5_000);
        group.bench_with_input(BenchmarkId::from_parameter(machines), &model, |b, model| {
            b.iter(|| black_box(solve(model, &config).best_objective))
        });
    }
    group.finish();
}

fn single_pass(c: &mut Criterion) {
    let inst = desk_instance(8, 3);
    let sel = rcjs_core::selector::parse_selector("(- (* W NSUC) (% DD PT))").unwrap();
    c.bench_function("single_pass_8_machines", |b| {
        b.iter(|| black_box(single_pass_construct(&inst, &sel)))
    });
    let constant = Selector::constant();
    c.bench_function("single_pass_8_machines_constant", |b| {
        b.iter(|| black_box(single_pass_construct(&inst, &constant)))
    });
}

criterion_group!(benches, root_propagation, branch_and_bound, single_pass);
criterion_main!(benches);
