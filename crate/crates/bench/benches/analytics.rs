use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use hetcdc_bench::{spread_profile, twelve_nodes, worked_example};
use hetcdc_core::{
    achievable_load, computation_aware, even_assignment, lower_bound, minimal_file_count, AllocationPlan, Rational,
};

fn loads(c: &mut Criterion) {
    let (m, w) = worked_example();
    let plan = AllocationPlan::new(&m).unwrap();
    c.bench_function("achievable_load/worked", |b| b.iter(|| achievable_load(black_box(&m), &plan, &w)));

    let m1 = twelve_nodes("1/3");
    let plan1 = AllocationPlan::new(&m1).unwrap();
    let w1 = computation_aware(&m1);
    c.bench_function("achievable_load/k12", |b| b.iter(|| achievable_load(black_box(&m1), &plan1, &w1)));
    c.bench_function("subbatches/k12", |b| b.iter(|| black_box(&plan1).subbatches()));
    c.bench_function("minimal_file_count/k12", |b| b.iter(|| minimal_file_count(black_box(&plan1))));
}

fn bounds(c: &mut Criterion) {
    let mut group = c.benchmark_group("lower_bound");
    for k in [8usize, 12, 16, 20] {
        let m = spread_profile(k);
        let w = even_assignment(k);
        group.bench_with_input(BenchmarkId::from_parameter(k), &k, |b, _| b.iter(|| lower_bound(black_box(&m), &w)));
    }
    group.finish();
}

/// One row of a scale sweep over a K=12 coefficient vector.
fn sweep_row(c: &mut Criterion) {
    let coeffs: Vec<Rational> = ["0.7", "0.8", "0.9", "0.9", "0.9", "1", "1", "1.05", "1.1", "1.1", "1.15", "1.15"]
        .iter()
        .map(|s| s.parse().unwrap())
        .collect();
    let mbar: Rational = "0.8".parse().unwrap();
    c.bench_function("sweep_row/k12", |b| {
        b.iter(|| {
            let m = coeffs.iter().map(|x| x * &mbar).collect();
            let p = hetcdc_core::validate_profile(m).unwrap();
            let plan = AllocationPlan::new(&p).unwrap();
            let w = computation_aware(&p);
            achievable_load(&p, &plan, &w).total
        })
    });
}

criterion_group!(benches, loads, bounds, sweep_row);
criterion_main!(benches);
