use criterion::{criterion_group, criterion_main, Criterion};

use fepkit::probes::{hinge_report, HingeOptions};
use fepkit::scan::{bz_scan, trace_ring, ScanGrid};
use fepkit::{HingeGeometry, HodsmSpec, LiebSpec, ModelSpec, TolerancePolicy};

fn scans(c: &mut Criterion) {
    let p = TolerancePolicy::default();
    let mut g = c.benchmark_group("scan");
    g.sample_size(10);
    let fep = ModelSpec::Lieb(LiebSpec::MinimalFep { epsilon: 1.0 });
    let grid = ScanGrid::new(2, 64).unwrap();
    g.bench_function("lieb_minimal_fep_64", |b| b.iter(|| bz_scan(&fep, &grid, &p).unwrap()));
    let ring = LiebSpec::Reciprocal {
        phi: std::f64::consts::FRAC_PI_4,
        psi: std::f64::consts::FRAC_PI_4,
    };
    g.bench_function("ring_64", |b| b.iter(|| trace_ring(&ring, 64, &p).unwrap()));
    g.finish();
}

fn hinge(c: &mut Criterion) {
    let p = TolerancePolicy::default();
    let mut g = c.benchmark_group("hinge");
    g.sample_size(10);
    for n in [8, 12] {
        let spec = HodsmSpec::standard(1, std::f64::consts::FRAC_1_SQRT_2);
        let geom = HingeGeometry::square(n, 0.0);
        g.bench_function(format!("nh1_{n}x{n}"), |b| {
            b.iter(|| hinge_report(&spec, &geom, &HingeOptions::default(), &p).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, scans, hinge);
criterion_main!(benches);
