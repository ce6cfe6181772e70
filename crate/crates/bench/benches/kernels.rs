use std::f64::consts::PI;
use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use vtheat_core::{
    disk_mass, temperature_parts, temperature_stieltjes, u0_closed_form, weber_asymptotic,
    weber_integral, CountingFunction, EvalParams, FieldPoint, PowerLaw, RayGeometry,
    RayTemperature, WeberQuery,
};

fn temperatures(c: &mut Criterion) {
    let p = EvalParams::default();
    let ray = RayGeometry::new(0.5).unwrap();
    let n: CountingFunction = PowerLaw::density(1.0, 1.5).unwrap().into();
    let mut g = c.benchmark_group("temperature");
    for (name, r, delta) in [
        ("near", 2.0, 0.7),
        ("forward", 50.0, 0.0),
        ("backward", 50.0, PI),
    ] {
        let x = FieldPoint::at_offset(r, &ray, delta).unwrap();
        g.bench_function(format!("stieltjes/{name}"), |b| {
            b.iter(|| temperature_stieltjes(black_box(&n), &ray, &x, 1.0, &p).unwrap())
        });
        g.bench_function(format!("parts/{name}"), |b| {
            b.iter(|| temperature_parts(black_box(&n), &ray, &x, 1.0, &p).unwrap())
        });
        g.bench_function(format!("weber_closed_form/{name}"), |b| {
            b.iter(|| u0_closed_form(1.0, black_box(1.5), r, delta, 1.0).unwrap())
        });
    }
    g.finish();
}

fn weber(c: &mut Criterion) {
    let mut g = c.benchmark_group("weber");
    for z in [-10.0, 0.0, 10.0] {
        let q = WeberQuery::new(-1.5, z);
        g.bench_function(format!("integral/z={z}"), |b| {
            b.iter(|| weber_integral(black_box(&q)).unwrap())
        });
    }
    let q = WeberQuery::new(-1.5, 10.0);
    g.bench_function("series/z=10", |b| {
        b.iter(|| weber_asymptotic(black_box(&q), 40).unwrap())
    });
    g.finish();
}

fn disk(c: &mut Criterion) {
    let p = EvalParams::default();
    let n: CountingFunction = PowerLaw::density(2.0, 1.0).unwrap().into();
    let u = RayTemperature::new(n, RayGeometry::new(0.3).unwrap(), p);
    c.bench_function("disk_mass/r=4,t=0.02", |b| {
        b.iter(|| disk_mass(&u, black_box(4.0), 0.02, &p).unwrap())
    });
}

criterion_group!(benches, temperatures, weber, disk);
criterion_main!(benches);
