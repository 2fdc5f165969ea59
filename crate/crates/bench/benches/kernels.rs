use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use forge_bench::{biregular, gadget, regular};
use forge_core::cycles::{girth, shortest_bicycle};
use forge_core::expansion::{exact_profile, exact_profile_auto, DEFAULT_BUDGET};
use forge_core::products::line_product;
use forge_core::spectral::nb_spectral_radius;
use forge_core::Side;

fn profiles(c: &mut Criterion) {
    let h = gadget();
    c.bench_function("exact_profile octagon t<=8", |b| {
        b.iter(|| exact_profile(black_box(&h), Side::Whole, 8, DEFAULT_BUDGET).unwrap())
    });
    let g = regular(200, 3);
    let cands: Vec<usize> = (0..g.n()).collect();
    c.bench_function("exact_profile_auto 3-regular n=200 t<=4", |b| {
        b.iter(|| exact_profile_auto(black_box(&g), &cands, Side::Whole, 4, DEFAULT_BUDGET).unwrap())
    });
}

fn radius(c: &mut Criterion) {
    let g = biregular(3, 4, 250).to_graph();
    c.bench_function("nb_spectral_radius (3,4) n=1750", |b| b.iter(|| nb_spectral_radius(black_box(&g)).unwrap()));
}

fn cycles(c: &mut Criterion) {
    let g = regular(500, 4);
    c.bench_function("girth 4-regular n=500", |b| b.iter(|| girth(black_box(&g))));
    c.bench_function("shortest_bicycle 4-regular n=500", |b| b.iter(|| shortest_bicycle(black_box(&g), None)));
}

fn products(c: &mut Criterion) {
    let g = regular(1000, 8);
    let h = gadget();
    c.bench_function("line_product 8-regular n=1000 with octagon", |b| {
        b.iter(|| line_product(black_box(&g), &h, None).unwrap())
    });
}

criterion_group!(benches, profiles, radius, cycles, products);
criterion_main!(benches);
