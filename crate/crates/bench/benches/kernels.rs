use criterion::{black_box, criterion_group, criterion_main, Criterion};

use entx_core::channels::{cavity_channel, gad, tensor, CavityParams, GadParams};
use entx_core::entanglement::{full_cut_negativity, is_entanglement_annihilating, EaConfig};
use entx_core::matrix::hermitian_eigen;
use entx_core::procedures::{classify_cell, procedure2_stinespring};
use entx_core::states::{phi_plus, random_density_with, seeded_rng, FOUR_QUBIT_DIMS};

fn eigen(c: &mut Criterion) {
    let rho = random_density_with(&FOUR_QUBIT_DIMS, &mut seeded_rng(1, 0));
    c.bench_function("hermitian_eigen_16", |b| b.iter(|| hermitian_eigen(black_box(rho.matrix())).unwrap()));
    c.bench_function("full_cut_negativity", |b| b.iter(|| full_cut_negativity(black_box(&rho)).unwrap()));
}

fn channels(c: &mut Criterion) {
    let g = gad(GadParams::new(0.6, 0.3).unwrap());
    let k = cavity_channel(5.0, &CavityParams::new(1.0, 0.1).unwrap()).unwrap();
    c.bench_function("channel_tensor_2x2", |b| b.iter(|| tensor(black_box(&g), black_box(&k)).unwrap()));
    let rho = phi_plus();
    let params = GadParams::new(0.75, 0.5).unwrap();
    c.bench_function("procedure2_stinespring", |b| {
        b.iter(|| procedure2_stinespring(black_box(&rho), &params).unwrap())
    });
}

fn certificates(c: &mut Criterion) {
    let g = gad(GadParams::new(0.75, 0.5).unwrap());
    let cfg = EaConfig {
        samples: 500,
        ..EaConfig::default()
    };
    let mut group = c.benchmark_group("ea");
    group.sample_size(10);
    group.bench_function("certificate_500", |b| b.iter(|| is_entanglement_annihilating(black_box(&g), &cfg).unwrap()));
    group.bench_function("classify_cell", |b| b.iter(|| classify_cell(0.75, 0.5, &cfg, true).unwrap()));
    group.finish();
}

criterion_group!(benches, eigen, channels, certificates);
criterion_main!(benches);
