use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use tbell::bell::{maximize_bell, quantum_bell, SearchOptions, SettingsQuad};
use tbell::game::{run_game, GameConfig};
use tbell::spatial::sum_bound_sweep;
use tbell::temporal::{sample_chain, MeasurementChain, SampleOptions};
use tbell::{BlochVector, Execution, QuantumState, Sharding};

const MODES: [(&str, Execution); 2] = [
    ("sequential", Execution::Sequential),
    ("parallel", Execution::Parallel),
];

fn shards() -> Sharding {
    Sharding::new(0, 8)
}

fn bench_sample_chain(c: &mut Criterion) {
    let settings = [
        BlochVector::X,
        BlochVector::Z,
        BlochVector::Y,
        BlochVector::X,
    ];
    let chain =
        MeasurementChain::from_settings(QuantumState::maximally_mixed(1).unwrap(), &settings)
            .unwrap();
    let products = [vec![0, 1, 2, 3], vec![0, 3]];
    let opts = SampleOptions::new(100_000, shards());
    let mut group = c.benchmark_group("sample_chain_1e5");
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| sample_chain(black_box(&chain), &products, &opts, exec).unwrap())
        });
    }
    group.finish();
}

fn bench_game(c: &mut Criterion) {
    let cfg = GameConfig::new(
        SettingsQuad::optimal(),
        QuantumState::maximally_mixed(1).unwrap(),
        100_000,
        shards(),
    )
    .unwrap();
    let mut group = c.benchmark_group("run_game_1e5");
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| run_game(black_box(&cfg), exec))
        });
    }
    group.finish();
}

fn bench_sweep(c: &mut Criterion) {
    let mut group = c.benchmark_group("sum_bound_sweep_1e3");
    group.sample_size(20);
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| sum_bound_sweep(1000, shards(), exec).unwrap())
        });
    }
    group.finish();
}

fn bench_search(c: &mut Criterion) {
    let opts = SearchOptions::default();
    let mut group = c.benchmark_group("maximize_bell_32_restarts");
    group.sample_size(20);
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| maximize_bell(|q| quantum_bell(q).value, &opts, exec))
        });
    }
    group.finish();
}

criterion_group!(
    benches,
    bench_sample_chain,
    bench_game,
    bench_sweep,
    bench_search
);
criterion_main!(benches);
