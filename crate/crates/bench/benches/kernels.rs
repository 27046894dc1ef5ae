use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use hyperlab::sampling::random_jet;
use hyperlab::{
    classify, hyperbolic_direction_test, principal_symbol_fd, real_root_count, skyrme_symbol,
    strain_invariants, stress_energy_sigma, symbol_det_poly, FieldJet, LagrangianModel, Poly,
    SearchConfig, Vector,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn jet() -> FieldJet {
    random_jet(&mut ChaCha8Rng::seed_from_u64(3), 4, 3, 0.6)
}

fn breakdown_jet() -> FieldJet {
    FieldJet::adapted(&[1.5, 0.5, 2.0, 0.0], 3).unwrap().jet
}

fn tensors(c: &mut Criterion) {
    let j = jet();
    c.bench_function("strain_invariants", |b| {
        b.iter(|| strain_invariants(black_box(&j)))
    });
    c.bench_function("stress_energy_sigma2", |b| {
        b.iter(|| stress_energy_sigma(black_box(&j), 2))
    });
}

fn symbols(c: &mut Criterion) {
    let j = jet();
    let model = LagrangianModel::Skyrme { c1: 0.5, c2: 0.5 };
    c.bench_function("skyrme_symbol", |b| {
        b.iter(|| skyrme_symbol(black_box(&j), 0.5, 0.5))
    });
    c.bench_function("principal_symbol_fd", |b| {
        b.iter(|| principal_symbol_fd(&model, black_box(&j)))
    });
}

fn hyperbolicity(c: &mut Criterion) {
    let j = breakdown_jet();
    let sym = skyrme_symbol(&j, 0.5, 0.5);
    let coarse = SearchConfig {
        n_dirs: 512,
        ..SearchConfig::default()
    };
    let mut group = c.benchmark_group("classify");
    group.sample_size(10);
    group.bench_function("skyrme_breakdown", |b| {
        b.iter(|| classify(black_box(&sym), &j.g, &coarse))
    });
    group.finish();

    let eta = Vector::from_vec(vec![0.0, 0.0, 0.0, 1.0]);
    let zeta = Vector::from_vec(vec![1.0, 0.0, 0.0, 0.0]);
    c.bench_function("symbol_det_poly", |b| {
        b.iter(|| symbol_det_poly(black_box(&sym), &zeta, &eta))
    });
    c.bench_function("hyperbolic_direction_test", |b| {
        b.iter(|| hyperbolic_direction_test(black_box(&sym), &eta, 16, 1))
    });
    let p =
        Poly::from_roots(&[-2.0, -0.5, 0.25, 1.0, 3.0, 3.0]).mul(&Poly::new(vec![1.0, 0.0, 1.0]));
    c.bench_function("real_root_count_deg8", |b| {
        b.iter(|| real_root_count(black_box(&p)))
    });
}

criterion_group!(benches, tensors, symbols, hyperbolicity);
criterion_main!(benches);
