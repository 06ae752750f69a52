//! Replicate fan-out over the rayon pool against the plain loop, on the two
//! hot kernels: ladder simulation and limit subordinator draws.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use fluctlab::ladder_sim::{LadderSimulator, StopRule};
use fluctlab::parallel::{map_indexed, map_indexed_seq};
use fluctlab::presets::Preset;
use fluctlab::rng::work_item_seed;
use fluctlab::subordinator::{sample_subordinator, SubordinatorSpec};

fn ladders(c: &mut Criterion) {
    let p = Preset::lookup("crit-exp-B2").unwrap();
    let mut g = c.benchmark_group("ladder-batch");
    g.sample_size(10);
    for n in [4u64, 16, 64] {
        let (spec, mark, sc) = p.at(n).unwrap();
        let sim = LadderSimulator::new(&spec, &mark, &sc).unwrap();
        let stop = StopRule::local_time(1.0);
        let one = |i: usize| sim.simulate(work_item_seed(7, n, i as u64), &stop).points.len();
        g.bench_with_input(BenchmarkId::new("parallel", n), &n, |b, _| {
            b.iter(|| black_box(map_indexed(2000, one)))
        });
        g.bench_with_input(BenchmarkId::new("sequential", n), &n, |b, _| {
            b.iter(|| black_box(map_indexed_seq(2000, one)))
        });
    }
    g.finish();
}

fn subordinator(c: &mut Criterion) {
    let spec = SubordinatorSpec::new(1.0, fluctlab::ladder_measure::LadderMeasure::zero(), 2.0, 0.2);
    let one = |i: usize| sample_subordinator(&spec, 5.0, i as u64).unwrap().events.len();
    let mut g = c.benchmark_group("subordinator-batch");
    g.bench_function("parallel", |b| b.iter(|| black_box(map_indexed(20_000, one))));
    g.bench_function("sequential", |b| b.iter(|| black_box(map_indexed_seq(20_000, one))));
    g.finish();
}

criterion_group!(benches, ladders, subordinator);
criterion_main!(benches);
