use avalanche_core::dynamics::{run_ffwor, run_frozen, FireParams, FrozenParams, FrozenRule, Streams};
use avalanche_core::percolation::estimate::estimate_connection;
use avalanche_core::percolation::{label_clusters, sample_bernoulli};
use avalanche_core::scales::{Backend, Model, ScheduleParams};
use avalanche_core::{Color, DenseRegion, Purpose, Region, StreamKey};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;
use std::sync::Arc;

fn percolation(c: &mut Criterion) {
    let mut g = c.benchmark_group("percolation");
    for n in [32u32, 128] {
        let dense = Arc::new(DenseRegion::new(Region::ball(n)).unwrap());
        let key = StreamKey::new(1, 0, Purpose::Bernoulli);
        g.bench_with_input(BenchmarkId::new("sample_and_label", n), &dense, |b, dense| {
            b.iter(|| {
                let config = sample_bernoulli(dense, 0.5, key).unwrap();
                black_box(label_clusters(&config, Color::Occupied))
            })
        });
    }
    g.sample_size(10);
    g.bench_function("estimate_connection_n64_x100", |b| {
        b.iter(|| estimate_connection(0.5, 64, 100, StreamKey::new(2, 0, Purpose::Bernoulli)).unwrap())
    });
    g.finish();
}

fn dynamics(c: &mut Criterion) {
    let mut g = c.benchmark_group("dynamics");
    g.sample_size(20);
    let dense = Arc::new(DenseRegion::new(Region::ball(60)).unwrap());
    let streams = Streams::derive(3, 0);
    for rule in [FrozenRule::Original, FrozenRule::Modified] {
        let params = FrozenParams { threshold: 500, rule };
        g.bench_function(format!("frozen_ball60_n500_{rule:?}"), |b| {
            b.iter(|| run_frozen(&dense, &params, &streams).unwrap())
        });
    }
    let params = FireParams::new(1e-3, 10.0);
    g.bench_function("ffwor_ball60_zeta1e-3", |b| b.iter(|| run_ffwor(&dense, &params, &streams).unwrap()));
    g.finish();
}

fn scales(c: &mut Criterion) {
    let backend = Backend::ansatz();
    let model = Model::fp_log(1e9).unwrap();
    let params = ScheduleParams::fp();
    c.bench_function("schedule_fp_ln1e9", |b| b.iter(|| backend.schedule(black_box(&model), &params).unwrap()));
    let model = Model::fp(1e6).unwrap();
    c.bench_function("t_infinity_fp_1e6", |b| b.iter(|| backend.t_infinity(black_box(&model)).unwrap()));
}

criterion_group!(benches, percolation, dynamics, scales);
criterion_main!(benches);
