use std::f64::consts::PI;

use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use fepkit::models::{hodsm_bloch, lieb_bloch};
use fepkit::{classify_point, flv_modes, weyr_oracle, HodsmSpec, LiebSpec, TolerancePolicy, C64};
use fepkit_bench::{planted, random};

fn modes(c: &mut Criterion) {
    let mut g = c.benchmark_group("flv_modes");
    for n in [4, 8, 16, 32, 64] {
        let h = random(n);
        g.bench_with_input(BenchmarkId::from_parameter(n), &h, |b, h| {
            b.iter(|| flv_modes(black_box(h), C64::new(0.0, 0.0)).unwrap())
        });
    }
    g.finish();
}

fn classify(c: &mut Criterion) {
    let p = TolerancePolicy::default();
    let zero = C64::new(0.0, 0.0);
    let lieb = lieb_bloch(&LiebSpec::MinimalFep { epsilon: 1.0 }, [PI, PI]).unwrap();
    let nh3 = hodsm_bloch(&HodsmSpec::standard(3, 0.5), [0.0, 0.0, PI / 2.0]).unwrap();
    c.bench_function("classify/lieb_fep", |b| b.iter(|| classify_point(black_box(&lieb), zero, &p).unwrap()));
    c.bench_function("classify/hodsm_nh3_fep", |b| b.iter(|| classify_point(black_box(&nh3), zero, &p).unwrap()));

    let mut g = c.benchmark_group("planted");
    for n in [4, 8, 16] {
        let h = planted(n);
        g.bench_with_input(BenchmarkId::new("modes", n), &h, |b, h| b.iter(|| classify_point(h, zero, &p).unwrap()));
        g.bench_with_input(BenchmarkId::new("oracle", n), &h, |b, h| b.iter(|| weyr_oracle(h, &p).unwrap()));
    }
    g.finish();
}

criterion_group!(benches, modes, classify);
criterion_main!(benches);
