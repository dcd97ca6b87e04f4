use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use mukai_core::enumerate::short_vectors_with;
use mukai_core::exec::Parallelism;
use mukai_core::lattice::{orthogonal_complement, ClassVector};
use mukai_core::walls::{construct_polarization_with, walls_through_with, AmpleClass, PolarizationBudget, WallSpec};

const MODES: [(&str, Parallelism); 2] = [("sequential", Parallelism::Sequential), ("parallel", Parallelism::Parallel)];

fn walls(c: &mut Criterion) {
    let mut group = c.benchmark_group("walls_through");
    let h = AmpleClass::new(ClassVector::hyperbolic(1, 1)).unwrap();
    for (spec, label) in [(WallSpec::new(2, 4).unwrap(), "2,4"), (WallSpec::new(2, 6).unwrap(), "2,6")] {
        for (name, mode) in MODES {
            group.bench_with_input(BenchmarkId::new(name, label), &spec, |b, spec| {
                b.iter(|| walls_through_with(black_box(&h), spec, mode).unwrap())
            });
        }
    }
    group.finish();
}

fn short(c: &mut Criterion) {
    let mut group = c.benchmark_group("short_vectors");
    let comp = orthogonal_complement(&(ClassVector::hyperbolic(2, 3) + ClassVector::e(1))).unwrap();
    for (name, mode) in MODES {
        group.bench_function(name, |b| b.iter(|| short_vectors_with(black_box(&comp), -8, -1, mode).unwrap()));
    }
    group.finish();
}

fn polarization(c: &mut Criterion) {
    let mut group = c.benchmark_group("construct_polarization");
    group.sample_size(10);
    let l1 = AmpleClass::new(ClassVector::hyperbolic(1, 2)).unwrap();
    let spec = WallSpec::new(2, 4).unwrap();
    let budget = PolarizationBudget::default();
    for (name, mode) in MODES {
        group.bench_function(name, |b| {
            b.iter(|| construct_polarization_with(black_box(&l1), &ClassVector::f(), &spec, &budget, mode).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, walls, short, polarization);
criterion_main!(benches);
