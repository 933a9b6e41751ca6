use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use cfinsler_core::bergman::{kahler_curvatures, BergmanKernelModel, BergmanMetricField};
use cfinsler_core::finsler::{hsc_chern_finsler, ExplicitFamily};
use cfinsler_core::invariant::kobayashi_metric;
use cfinsler_core::sampling::rng;
use cfinsler_core::squeezing::affine_squeeze_lower;
use cfinsler_core::DomainSpec;

fn curvature(c: &mut Criterion) {
    let d = DomainSpec::unit_ball(2);
    let mut r = rng(1);
    let (z, v) = (d.sample_interior(&mut r, 0.8), d.sample_direction(&mut r));
    let g = ExplicitFamily::new(1.0, 0.5, d.clone()).unwrap();
    c.bench_function("hsc_explicit_family_ball2", |b| b.iter(|| hsc_chern_finsler(&g, black_box(&z), black_box(&v)).unwrap()));
    let field = BergmanMetricField::closed_form(&d).unwrap();
    c.bench_function("kahler_curvatures_ball2", |b| b.iter(|| kahler_curvatures(&field, black_box(&z), black_box(&v)).unwrap()));
}

fn kernel(c: &mut Criterion) {
    let d = DomainSpec::ellipsoid(vec![1.0, 1.5]).unwrap();
    let mut g = c.benchmark_group("kernel");
    g.sample_size(10);
    g.bench_function("ellipsoid_degree_12", |b| b.iter(|| BergmanKernelModel::for_domain(black_box(&d), 12).unwrap()));
    g.finish();
}

fn invariant(c: &mut Criterion) {
    let d = DomainSpec::ellipsoid(vec![1.0, 2.0]).unwrap();
    let mut r = rng(2);
    let (z, v) = (d.sample_interior(&mut r, 0.8), d.sample_direction(&mut r));
    c.bench_function("kobayashi_ellipsoid", |b| b.iter(|| kobayashi_metric(&d, black_box(&z), black_box(&v), 1).unwrap()));
    let p = DomainSpec::polydisk(vec![1.0, 0.7]).unwrap();
    let w = p.sample_interior(&mut r, 0.8);
    c.bench_function("affine_squeeze_polydisk", |b| b.iter(|| affine_squeeze_lower(&p, black_box(&w)).unwrap()));
}

criterion_group!(benches, curvature, kernel, invariant);
criterion_main!(benches);
