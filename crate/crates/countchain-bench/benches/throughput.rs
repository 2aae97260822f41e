//! Hot paths: full scenario runs, request hashing, and the closed-form
//! probability kernels.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};

use countchain::analysis::{decision_probability, sybil_majority_probability, SybilSetting};
use countchain::{hash_input_id, run_scenario};
use countchain_bench::reference_scenario;

fn bench_scenarios(c: &mut Criterion) {
    let mut group = c.benchmark_group("scenario");
    group.sample_size(10);
    for events in [200u32, 1000] {
        group.throughput(Throughput::Elements(u64::from(events)));
        group.bench_with_input(BenchmarkId::from_parameter(events), &events, |b, &n| {
            let spec = reference_scenario(n);
            b.iter(|| run_scenario(black_box(&spec)));
        });
    }
    group.finish();
}

fn bench_hashing(c: &mut Criterion) {
    let payload: Vec<u8> = (0..64u8).collect();
    c.bench_function("hash_input_id", |b| {
        b.iter(|| hash_input_id(black_box(&payload)));
    });
}

fn bench_closed_forms(c: &mut Criterion) {
    c.bench_function("decision_probability_n14", |b| {
        b.iter(|| decision_probability(black_box(14), black_box(0.85)));
    });
    let setting = SybilSetting::new(200, 66, 14)
        .expect("valid population")
        .with_majority_threshold(8);
    c.bench_function("sybil_majority_probability", |b| {
        b.iter(|| sybil_majority_probability(black_box(&setting)));
    });
}

criterion_group!(benches, bench_scenarios, bench_hashing, bench_closed_forms);
criterion_main!(benches);
