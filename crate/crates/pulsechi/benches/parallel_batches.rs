//! Data-parallel batch mapping against its sequential fallback.
//!
//! Two workloads bracket the per-item cost range seen in practice: the
//! analytic readout of one pulse sequence (microseconds) and a dense
//! displacement-matrix build (tens of microseconds).

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use num_complex::Complex64 as C64;
use pulsechi::states::chi_coherent;
use pulsechi::model::{OscillatorParams, ProbeAmplitudes, SequenceFamily};
use pulsechi::oracle::FockSpace;
use pulsechi::par::{map_batch, map_batch_seq};
use std::f64::consts::PI;
use std::hint::black_box;

fn readout_items(count: usize) -> Vec<f64> {
    (1..=count).map(|k| 2.0 * PI * k as f64 / count as f64).collect()
}

fn readout_one(p: &OscillatorParams, probe: &ProbeAmplitudes, tau0: f64) -> C64 {
    let seq = SequenceFamily::Equidistant { tau0, n: 10 }.expand().unwrap();
    let m = pulsechi::analytic::predict_readout(p, probe, &seq, |b| {
        chi_coherent(C64::new(1.5, 0.0), b)
    })
    .unwrap();
    m.chi_plus
}

fn bench_readout(c: &mut Criterion) {
    let p = OscillatorParams::new(1.0, 1e-4, 0.3, 0.075).unwrap();
    let probe = ProbeAmplitudes::balanced();
    let mut group = c.benchmark_group("readout_batch");
    for count in [512usize, 4096] {
        let items = readout_items(count);
        group.bench_with_input(BenchmarkId::new("parallel", count), &items, |b, items| {
            b.iter(|| {
                let out = map_batch(items.clone(), |t| readout_one(&p, &probe, t));
                black_box(out)
            })
        });
        group.bench_with_input(BenchmarkId::new("sequential", count), &items, |b, items| {
            b.iter(|| {
                let out = map_batch_seq(items.clone(), |t| readout_one(&p, &probe, t));
                black_box(out)
            })
        });
    }
    group.finish();
}

fn bench_displacements(c: &mut Criterion) {
    let space = FockSpace::new(24).unwrap();
    let betas: Vec<C64> = (0..256)
        .map(|k| {
            let t = 2.0 * PI * k as f64 / 256.0;
            C64::new(2.0 * t.cos(), 2.0 * t.sin())
        })
        .collect();
    let mut group = c.benchmark_group("displacement_batch");
    group.bench_function("parallel", |b| {
        b.iter(|| {
            let out = map_batch(betas.clone(), |beta| space.displacement(beta).matrix);
            black_box(out)
        })
    });
    group.bench_function("sequential", |b| {
        b.iter(|| {
            let out = map_batch_seq(betas.clone(), |beta| space.displacement(beta).matrix);
            black_box(out)
        })
    });
    group.finish();
}

criterion_group!(benches, bench_readout, bench_displacements);
criterion_main!(benches);
