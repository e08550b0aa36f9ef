use std::hint::black_box;
use std::sync::Arc;

use criterion::{criterion_group, criterion_main, BatchSize, BenchmarkId, Criterion, Throughput};

use sparse_pauli::binning::subsample_bins;
use sparse_pauli::channel::random_sparse_channel;
use sparse_pauli::wht::{wht_inplace, WhtOrdering};
use sparse_pauli::{noisy_peel, peel, ChannelOracle, PeelConfig, RepetitionCode, SubsamplingDesign};

fn bench_wht(c: &mut Criterion) {
    let mut group = c.benchmark_group("wht");
    for k in [10usize, 14, 18] {
        let len = 1usize << k;
        let v: Vec<f64> = (0..len).map(|i| ((i * 2654435761) % 1000) as f64 / 1000.0).collect();
        group.throughput(Throughput::Elements(len as u64));
        for ordering in [WhtOrdering::Natural, WhtOrdering::Symplectic] {
            if ordering == WhtOrdering::Symplectic && k % 2 == 1 {
                continue;
            }
            group.bench_with_input(BenchmarkId::new(format!("{ordering:?}"), k), &v, |bch, v| {
                bch.iter_batched_ref(|| v.clone(), |buf| wht_inplace(black_box(buf), ordering).unwrap(), BatchSize::LargeInput)
            });
        }
    }
    group.finish();
}

fn provable(n: usize, b: usize) -> SubsamplingDesign {
    let code = Arc::new(RepetitionCode::new(2 * n, RepetitionCode::DEFAULT_REPETITIONS).unwrap());
    SubsamplingDesign::provable(n, b, 2, 16, code, 11).unwrap()
}

fn bench_binning(c: &mut Criterion) {
    let mut group = c.benchmark_group("binning");
    group.sample_size(10);
    let ch = random_sparse_channel(10, 32, 1e-4, 0.9, 1).unwrap();
    for b in [6usize, 8, 10] {
        let design = provable(10, b);
        let oracle = ChannelOracle::new(&ch, 1e-4, 5).unwrap();
        group.throughput(Throughput::Elements(design.max_queries() as u64));
        group.bench_function(BenchmarkId::new("provable", b), |bch| {
            bch.iter(|| subsample_bins(black_box(&oracle), &design).unwrap())
        });
    }
    group.finish();
}

fn bench_peel(c: &mut Criterion) {
    let mut group = c.benchmark_group("peel");
    group.sample_size(20);
    for s in [16usize, 64] {
        let ch = random_sparse_channel(10, s, 1e-4, 0.9, 2).unwrap();
        let design = provable(10, 8);
        let oracle = ChannelOracle::new(&ch, 1e-5, 3).unwrap();
        let bins = subsample_bins(&oracle, &design).unwrap();
        let cfg = PeelConfig::for_sparsity(s);
        group.bench_function(BenchmarkId::new("provable", s), |bch| {
            bch.iter_batched(|| bins.clone(), |bins| peel(bins, &design, cfg.clone()).unwrap(), BatchSize::SmallInput)
        });
        // The relaxing peeler reads basis offsets, not coded ones.
        let local = SubsamplingDesign::heuristic_random(10, 8, 2, 11).unwrap();
        let local_bins = subsample_bins(&oracle, &local).unwrap();
        group.bench_function(BenchmarkId::new("noisy", s), |bch| {
            bch.iter_batched(|| local_bins.clone(), |bins| noisy_peel(bins, &local, cfg.clone()).unwrap(), BatchSize::SmallInput)
        });
    }
    group.finish();
}

criterion_group!(benches, bench_wht, bench_binning, bench_peel);
criterion_main!(benches);
