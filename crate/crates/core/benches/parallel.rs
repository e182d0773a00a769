//! Sequential against data-parallel execution on the batch entry points.

use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use hurwitzkit::bounds::generalized_hurwitz_bounds_with;
use hurwitzkit::contraction::infinitesimal_constant_with;
use hurwitzkit::contraction::DEFAULT_MARGIN;
use hurwitzkit::geodesic::{distances, DistanceOptions, Metric};
use hurwitzkit::sampling::random_point;
use hurwitzkit::{cpoint, DomainSpec, Execution};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn batch_distances(c: &mut Criterion) {
    let d = DomainSpec::PuncturedDisk;
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let pairs: Vec<_> = (0..32).map(|_| (random_point(&d, &mut rng), random_point(&d, &mut rng))).collect();
    let opts = DistanceOptions::default();
    let mut g = c.benchmark_group("distances_32_pairs");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| distances(&d, Metric::Hurwitz, black_box(&pairs), &opts, exec))
        });
    }
    g.finish();
}

fn bound_candidates(c: &mut Criterion) {
    let (y, omega) = (DomainSpec::PuncturedDisk, DomainSpec::PlaneMinusPoint { b: cpoint(0.5, 0.5) });
    let mut g = c.benchmark_group("bounds_budget_256");
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| generalized_hurwitz_bounds_with(&y, &omega, black_box(cpoint(1.0, 0.2)), 1e-9, 256, exec))
        });
    }
    g.finish();
}

fn ratio_sampling(c: &mut Criterion) {
    let (inner, outer) = (DomainSpec::PuncturedDisk, DomainSpec::unit_disk());
    let mut g = c.benchmark_group("ratio_samples_24_levels");
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| infinitesimal_constant_with(&inner, &outer, black_box(24), DEFAULT_MARGIN, exec))
        });
    }
    g.finish();
}

criterion_group!(benches, batch_distances, bound_candidates, ratio_sampling);
criterion_main!(benches);
