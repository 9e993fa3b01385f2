// SPDX-License-Identifier: Apache-2.0

use std::f64::consts::PI;
use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use nalgebra::DMatrix;
use num::complex::Complex64;

use repvol_bench::sample_hom;
use repvol_core::dehn::{filling_path, solve};
use repvol_core::lattice::euclidean_volume_cocycle;
use repvol_core::lorentz::{k_gen, DEFAULT_TOL};
use repvol_core::rational::q;
use repvol_core::special::{bloch_wigner, lobachevsky};
use repvol_core::*;

fn chains(c: &mut Criterion) {
    let mut group = c.benchmark_group("fundamental_cycle");
    for n in [4, 5, 6] {
        group.bench_with_input(BenchmarkId::new("build", n), &n, |b, &n| {
            b.iter(|| fundamental_cycle(black_box(n)).unwrap())
        });
        let z = fundamental_cycle(n).unwrap();
        let v = euclidean_volume_cocycle(n);
        group.bench_with_input(BenchmarkId::new("volume_pairing", n), &n, |b, _| {
            b.iter(|| v.evaluate(black_box(&z)).unwrap())
        });
    }
    group.finish();
}

fn rotation_numbers(c: &mut Criterion) {
    let mut group = c.benchmark_group("higher_rotation_number");
    for m in [2, 3] {
        let hom = sample_hom(m);
        group.bench_with_input(BenchmarkId::from_parameter(m), &hom, |b, hom| {
            b.iter(|| higher_rotation_number(black_box(hom)).unwrap())
        });
    }
    group.finish();
}

fn special_functions(c: &mut Criterion) {
    c.bench_function("lobachevsky", |b| b.iter(|| lobachevsky(black_box(PI / 5.0))));
    let z = Complex64::new(-0.3, 1.7);
    c.bench_function("bloch_wigner", |b| b.iter(|| bloch_wigner(black_box(z))));
}

fn lorentz(c: &mut Criterion) {
    let mut r = DMatrix::identity(4, 4);
    r[(0, 0)] = 0.6;
    r[(0, 1)] = -0.8;
    r[(1, 0)] = 0.8;
    r[(1, 1)] = 0.6;
    let g = k_gen(&r, 1e-12).unwrap().mul(&a_gen(4, 0.7).unwrap());
    let family: Vec<LorentzMatrix> = [[0.3, -0.1, 0.5], [1.0, 0.2, -0.4]]
        .iter()
        .map(|x| n_gen(x).unwrap().conjugate_by(&g))
        .collect();
    c.bench_function("classify_parabolic", |b| {
        b.iter(|| classify(black_box(&family[0]), DEFAULT_TOL).unwrap())
    });
    c.bench_function("common_invariant_structure", |b| {
        b.iter(|| common_invariant_structure(black_box(&family), DEFAULT_TOL).unwrap())
    });
}

fn dehn_filling(c: &mut Criterion) {
    let gs = GluingSystem::figure_eight();
    c.bench_function("figure_eight_complete", |b| {
        b.iter(|| solve(black_box(&gs), &[None], None, 1e-12, 100).unwrap())
    });
    c.bench_function("figure_eight_fill_5_1", |b| {
        b.iter(|| solve(black_box(&gs), &[Some((5, 1))], None, 1e-12, 100).unwrap())
    });
    c.bench_function("figure_eight_path_100", |b| {
        b.iter(|| filling_path(black_box(&gs), &[Some((5, 1))], 100, 1e-10, 100).unwrap())
    });
}

fn transfer(c: &mut Criterion) {
    let alpha = LatticeCochain::new(1, 1, ValueKind::Real, |p| {
        CochainValue::Real((p[1].coords()[0] - p[0].coords()[0]).abs().min(1) as f64)
    });
    let bad = bad_domain(12).unwrap();
    let t = transfer_cochain(&alpha, &bad, 64, Quadrature::Refined).unwrap();
    let inputs = [q(1, 3), q(22, 7)];
    c.bench_function("transfer_bad_domain_12", |b| b.iter(|| t.evaluate(black_box(&inputs)).unwrap()));
}

criterion_group!(benches, chains, rotation_numbers, special_functions, lorentz, dehn_filling, transfer);
criterion_main!(benches);
