use std::f64::consts::{FRAC_1_SQRT_2, PI};

use fepkit::models::{hodsm_bloch, lieb_bloch, two_arccot};
use fepkit::{classify_point, ComplexMatrix, HodsmSpec, Label, LiebSpec, TolerancePolicy, C64};

fn zero() -> C64 {
    C64::new(0.0, 0.0)
}

fn fingerprint(h: &ComplexMatrix) -> (usize, usize, Vec<usize>, Label) {
    let r = classify_point(h, zero(), &TolerancePolicy::default()).unwrap();
    (r.alpha, r.gamma, r.partials, r.label)
}

#[test]
fn lieb_table() {
    let h = lieb_bloch(&LiebSpec::Hermitian, [PI, PI]).unwrap();
    assert_eq!(fingerprint(&h), (3, 3, vec![1, 1, 1], Label::Diabolic(3)));

    let k0 = (0.5f64 - 1.0).acos();
    for (sx, sy) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
        let h = lieb_bloch(&LiebSpec::NhSymmetric { epsilon: 1.0 }, [sx * k0, sy * k0]).unwrap();
        assert_eq!(fingerprint(&h), (3, 1, vec![3], Label::Exceptional(3)));
    }

    let spec = LiebSpec::MinimalFep { epsilon: 1.0 };
    let h = lieb_bloch(&spec, [PI, PI]).unwrap();
    assert_eq!(fingerprint(&h), (3, 2, vec![2, 1], Label::Fragmented));
    let a = two_arccot(0.5);
    let h = lieb_bloch(&spec, [a, -a]).unwrap();
    assert_eq!(fingerprint(&h), (3, 1, vec![3], Label::Exceptional(3)));
}

#[test]
fn lieb_flat_band_is_simple_away_from_corner() {
    let h = lieb_bloch(&LiebSpec::Hermitian, [0.0, 0.0]).unwrap();
    assert_eq!(fingerprint(&h), (1, 1, vec![1], Label::Nondegenerate));
}

#[test]
fn hodsm_table() {
    let at = |v: u8, eps: f64, kz: f64| {
        let h = hodsm_bloch(&HodsmSpec::standard(v, eps), [0.0, 0.0, kz]).unwrap();
        fingerprint(&h)
    };
    let q = PI / 4.0;
    for kz in [PI / 2.0, -PI / 2.0] {
        assert_eq!(at(0, 0.0, kz), (4, 4, vec![1, 1, 1, 1], Label::Diabolic(4)));
        assert_eq!(at(1, FRAC_1_SQRT_2, kz), (2, 2, vec![1, 1], Label::Diabolic(2)));
        assert_eq!(at(2, FRAC_1_SQRT_2, kz), (4, 2, vec![3, 1], Label::Fragmented));
        assert_eq!(at(3, 0.5, kz), (4, 2, vec![2, 2], Label::Fragmented));
        assert_eq!(at(4, 1.0 / 8f64.sqrt(), kz), (4, 3, vec![2, 1, 1], Label::Fragmented));
    }
    for kz in [q, -q, 3.0 * q, -3.0 * q] {
        assert_eq!(at(1, FRAC_1_SQRT_2, kz), (4, 1, vec![4], Label::Exceptional(4)));
        assert_eq!(at(3, 0.5, kz), (2, 1, vec![2], Label::Exceptional(2)));
    }
    for kz in [3.0 * q, -3.0 * q] {
        assert_eq!(at(2, FRAC_1_SQRT_2, kz), (4, 2, vec![3, 1], Label::Fragmented));
        assert_eq!(at(4, 1.0 / 8f64.sqrt(), kz), (2, 1, vec![2], Label::Exceptional(2)));
    }
}

#[test]
fn response_strengths_of_nh3_fep() {
    let h = hodsm_bloch(&HodsmSpec::standard(3, 0.5), [0.0, 0.0, PI / 2.0]).unwrap();
    let r = classify_point(&h, zero(), &TolerancePolicy::default()).unwrap();
    let (eta, xi) = (r.eta.unwrap(), r.xi.unwrap());
    assert!((eta - 0.5 * 2f64.sqrt()).abs() < 1e-6, "eta = {eta}");
    assert!((xi - 0.5).abs() < 1e-6, "xi = {xi}");
    assert!((eta / xi - 2f64.sqrt()).abs() < 1e-6);
}
