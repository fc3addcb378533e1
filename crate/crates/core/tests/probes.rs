use std::f64::consts::{FRAC_1_SQRT_2, PI};

use fepkit::models::{hodsm_bloch, lieb_bloch, symmetry::generalized_reflection};
use fepkit::probes::{
    atomistic_classify, expected_to_hold, hinge_report, lineshape_exponent, splitting_exponent, symmetry_check, Axis,
    CheckKind, DecayProfiler, HingeOptions, SplittingConfig,
};
use fepkit::{ComplexMatrix, Corner, HingeGeometry, HodsmSpec, LiebSpec, ModelSpec, TolerancePolicy, C64};

fn zero() -> C64 {
    C64::new(0.0, 0.0)
}

fn policy() -> TolerancePolicy {
    TolerancePolicy::default()
}

fn bulk(v: u8, eps: f64, kz: f64) -> ComplexMatrix {
    hodsm_bloch(&HodsmSpec::standard(v, eps), [0.0, 0.0, kz]).unwrap()
}

#[test]
fn lineshape_slopes() {
    let cases = [
        (ComplexMatrix::diagonal(&[C64::new(1.0, 0.0), C64::new(2.0, 0.0)]).unwrap(), C64::new(1.0, 0.0), 1),
        (lieb_bloch(&LiebSpec::MinimalFep { epsilon: 1.0 }, [PI, PI]).unwrap(), zero(), 2),
        (bulk(2, FRAC_1_SQRT_2, PI / 2.0), zero(), 3),
        (bulk(1, FRAC_1_SQRT_2, PI / 4.0), zero(), 4),
    ];
    for (h, e, ell) in cases {
        let fit = lineshape_exponent(&h, e, ell, (1e-3, 1e-2), 20, &policy()).unwrap();
        assert!(fit.within(0.02), "ell {ell}: {fit:?}");
        assert!(fit.r_squared >= 0.99);
    }
}

#[test]
fn splitting_slopes() {
    let cases = [
        (bulk(1, FRAC_1_SQRT_2, PI / 4.0), 4),
        (lieb_bloch(&LiebSpec::MinimalFep { epsilon: 1.0 }, [PI, PI]).unwrap(), 2),
        (bulk(1, FRAC_1_SQRT_2, PI / 2.0), 1),
    ];
    for (h, ell) in cases {
        let fit = splitting_exponent(&h, zero(), ell, &SplittingConfig::default(), &policy()).unwrap();
        assert!(fit.within(0.05), "ell {ell}: {fit:?}");
        assert!(fit.r_squared >= 0.99);
    }
}

#[test]
fn atomistic_partials() {
    let expected: [(u8, f64, &[usize]); 5] = [
        (0, 0.0, &[1, 1, 1, 1]),
        (1, FRAC_1_SQRT_2, &[1, 1]),
        (2, FRAC_1_SQRT_2, &[3, 1]),
        (3, 0.5, &[2, 2]),
        (4, 1.0 / 8f64.sqrt(), &[2, 1, 1]),
    ];
    for (v, eps, partials) in expected {
        let spec = HodsmSpec::new(v, -0.5, 1.0, eps).unwrap();
        let r = atomistic_classify(&spec, &HingeGeometry::square(3, 0.0), &policy()).unwrap();
        assert_eq!(r.report.partials, partials, "variant {v}");
    }
}

#[test]
fn atomistic_hybridized_pair_shrinks_with_chain_length() {
    let spec = HodsmSpec::new(1, -0.5, 1.0, FRAC_1_SQRT_2).unwrap();
    // The pair alternates with the parity of the chain, so compare odd lengths.
    let mut last = f64::INFINITY;
    for ny in [3, 5, 7, 9] {
        let r = atomistic_classify(&spec, &HingeGeometry { nx: 3, ny, kz: 0.0 }, &policy()).unwrap();
        assert_eq!(r.report.partials, vec![1, 1]);
        let e = r.lowest_nonzero[0].norm();
        assert!(e < spec.s.abs() && e < last, "ny {ny}: |E| = {e}");
        assert!((r.lowest_nonzero[1].norm() - e).abs() < 1e-8 * e.max(1.0), "a pair");
        last = e;
    }
}

#[test]
fn symmetry_table() {
    let eps = [0.0, FRAC_1_SQRT_2, FRAC_1_SQRT_2, 0.5, 1.0 / 8f64.sqrt()];
    let g = HingeGeometry::square(5, 0.3);
    assert!(generalized_reflection(&HingeGeometry { nx: 4, ny: 5, kz: 0.0 }).is_err());
    for v in 0..5u8 {
        let m = ModelSpec::Hodsm(HodsmSpec::standard(v, eps[v as usize]));
        for kind in CheckKind::ALL {
            let verdict = symmetry_check(&m, Some(&g), kind, &policy());
            if kind == CheckKind::Kramers && v != 0 {
                assert!(verdict.is_err());
                continue;
            }
            let verdict = verdict.unwrap();
            assert_eq!(verdict.pass, expected_to_hold(kind, v), "variant {v} {kind}: {verdict:?}");
        }
    }
}

#[test]
fn kramers_on_ten_by_ten() {
    let m = ModelSpec::Hodsm(HodsmSpec::standard(0, 0.0));
    let v = symmetry_check(&m, Some(&HingeGeometry::square(10, 0.0)), CheckKind::Kramers, &policy()).unwrap();
    assert!(v.pass, "{v:?}");
}

#[test]
fn hermitian_low_set_shrinks_with_size() {
    let spec = HodsmSpec::standard(0, 0.0);
    let e4 = |n| {
        let r = hinge_report(&spec, &HingeGeometry::square(n, 0.0), &HingeOptions::default(), &policy()).unwrap();
        r.eigenvalues[r.low_set[3]].norm()
    };
    assert!(e4(16) > e4(24));
}

#[test]
fn decay_ratios() {
    let check = |spec: HodsmSpec, corners: &[Corner], axis: Axis| {
        let geom = match axis {
            Axis::X => HingeGeometry { nx: 30, ny: 12, kz: 0.0 },
            Axis::Y => HingeGeometry { nx: 12, ny: 30, kz: 0.0 },
        };
        let prof = DecayProfiler::new(&spec, &geom, 4096).unwrap();
        for &c in corners {
            let fit = prof.fit(c, axis).unwrap();
            assert!((fit.ratio - fit.expected).abs() <= 0.1 * fit.expected, "{spec:?} {c} {axis:?}: {fit:?}");
        }
    };
    for axis in [Axis::X, Axis::Y] {
        check(HodsmSpec::standard(0, 0.0), &Corner::ALL, axis);
    }
    let nh1 = HodsmSpec::standard(1, 0.25);
    check(nh1, &[Corner::B], Axis::Y);
    check(nh1, &[Corner::B], Axis::X);
}

#[test]
fn decay_table_all_variants() {
    for v in 1..=4u8 {
        let spec = HodsmSpec::standard(v, 0.25);
        for axis in [Axis::X, Axis::Y] {
            let geom = match axis {
                Axis::X => HingeGeometry { nx: 30, ny: 12, kz: 0.0 },
                Axis::Y => HingeGeometry { nx: 12, ny: 30, kz: 0.0 },
            };
            let prof = DecayProfiler::new(&spec, &geom, 4096).unwrap();
            for c in Corner::ALL {
                let fit = prof.fit(c, axis).unwrap();
                assert!(
                    (fit.ratio - fit.expected).abs() <= 0.1 * fit.expected,
                    "variant {v} {c} {axis:?}: {} vs {}",
                    fit.ratio,
                    fit.expected
                );
            }
        }
    }
}
