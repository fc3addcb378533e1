use std::f64::consts::PI;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use fepkit::adjugate::greens_modal;
use fepkit::matkit::{eigenvalues, singular_values};
use fepkit::models::hinge::hinge_hamiltonian;
use fepkit::models::symmetry::{chiral_dsm, chiral_lieb};
use fepkit::models::{hodsm_bloch, hodsm_closed_dispersion, lieb_bloch};
use fepkit::selftest::{check_planted, direct_inverse};
use fepkit::testgen::{complex_normal, planted_jordan, random_partition, random_unitary};
use fepkit::{
    classify_point, eig, flv_modes, numerical_rank, spectral_norm, ComplexMatrix,
    HingeGeometry, HodsmSpec, LiebSpec, TolerancePolicy, C64,
};

fn policy() -> TolerancePolicy {
    TolerancePolicy::default()
}

fn zero() -> C64 {
    C64::new(0.0, 0.0)
}

fn planted(seed: u64, n_max: usize, cond: f64) -> fepkit::testgen::PlantedJordan {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sizes = random_partition(n_max, &mut rng);
    let used: usize = sizes.iter().sum();
    let extra = rng.gen_range(0..=n_max - used);
    planted_jordan(&sizes, extra, cond, &mut rng)
}

fn conjugate(h: &ComplexMatrix, u: &ComplexMatrix) -> ComplexMatrix {
    u.matmul(h).matmul(&u.adjoint())
}

fn lieb_specs(eps: f64, phi: f64, psi: f64) -> [LiebSpec; 4] {
    [
        LiebSpec::Hermitian,
        LiebSpec::NhSymmetric { epsilon: eps },
        LiebSpec::MinimalFep { epsilon: eps },
        LiebSpec::Reciprocal { phi, psi },
    ]
}

/// Greedy nearest-neighbour matching of two spectra.
fn same_multiset(a: &[C64], b: &[C64], tol: f64) -> bool {
    let mut used = vec![false; b.len()];
    a.len() == b.len()
        && a.iter().all(|x| {
            let best = (0..b.len())
                .filter(|&j| !used[j])
                .min_by(|&i, &j| (b[i] - x).norm().total_cmp(&(b[j] - x).norm()));
            match best {
                Some(j) if (b[j] - x).norm() <= tol => {
                    used[j] = true;
                    true
                }
                _ => false,
            }
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn planted_unitary_structure_is_recovered(seed in any::<u64>()) {
        let pj = planted(seed, 8, 1.0);
        prop_assert!(check_planted(&pj, &policy()).is_ok(), "{:?}", check_planted(&pj, &policy()));
    }

    #[test]
    fn planted_stress_structure_is_recovered(seed in any::<u64>(), cond in 1.5f64..10.0) {
        let pj = planted(seed, 8, cond);
        prop_assert!(check_planted(&pj, &policy()).is_ok(), "{:?}", check_planted(&pj, &policy()));
    }

    #[test]
    fn rank_plus_nullity(seed in any::<u64>(), n in 2usize..=10, deficit in 0usize..=10) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let r = n - deficit.min(n);
        let u = random_unitary(n, &mut rng);
        let v = random_unitary(n, &mut rng);
        let s: Vec<C64> = (0..n)
            .map(|i| C64::new(if i < r { rng.gen_range(0.1..10.0) } else { 0.0 }, 0.0))
            .collect();
        let a = u.matmul(&ComplexMatrix::diagonal(&s).unwrap()).matmul(&v.adjoint());
        let rank = numerical_rank(&a, &policy()).unwrap();
        let sv = singular_values(&a).unwrap();
        let cutoff = policy().rank_cutoff(sv[0], a.frobenius_norm());
        let null = sv.iter().filter(|&&x| x <= cutoff).count();
        prop_assert_eq!(rank, r);
        prop_assert_eq!(rank + null, n);
    }

    #[test]
    fn spectral_norm_of_adjoint(seed in any::<u64>(), n in 1usize..=12) {
        let a = complex_normal(n, &mut ChaCha8Rng::seed_from_u64(seed));
        let (x, y) = (spectral_norm(&a).unwrap(), spectral_norm(&a.adjoint()).unwrap());
        prop_assert!((x - y).abs() <= 1e-12 * x);
    }

    #[test]
    fn basis_invariance(seed in any::<u64>()) {
        let pj = planted(seed, 8, 1.0);
        let u = random_unitary(pj.h.n(), &mut ChaCha8Rng::seed_from_u64(seed ^ 0x55));
        let a = classify_point(&pj.h, zero(), &policy()).unwrap();
        let b = classify_point(&conjugate(&pj.h, &u), zero(), &policy()).unwrap();
        prop_assert_eq!((a.alpha, a.gamma, a.ell, &a.partials, a.label), (b.alpha, b.gamma, b.ell, &b.partials, b.label));
    }

    #[test]
    fn report_invariants(seed in any::<u64>()) {
        let pj = planted(seed, 8, 1.0);
        let r = classify_point(&pj.h, zero(), &policy()).unwrap();
        prop_assert!(r.validate().is_ok());
        // Mode ranks never decrease up to alpha.
        prop_assert!(r.mode_ranks.windows(2).all(|w| w[0] <= w[1]), "{:?}", r.mode_ranks);
        let (eta, xi) = (r.eta.unwrap(), r.xi.unwrap());
        let lead = r.mode_ranks[r.alpha - r.ell] as f64;
        prop_assert!(xi <= eta * (1.0 + 1e-12));
        prop_assert!(eta <= lead.sqrt() * xi * (1.0 + 1e-12));
        if lead == 1.0 {
            prop_assert!((eta - xi).abs() <= 1e-10 * eta);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn resolvent_identity(seed in any::<u64>(), n in 2usize..=8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = complex_normal(n, &mut rng);
        let omega = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let e = C64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let radius = policy().cluster_radius(spectral_norm(&h).unwrap());
        prop_assume!(eigenvalues(&h).unwrap().iter().all(|l| (l - e).norm() >= radius));
        let g = greens_modal(&flv_modes(&h, omega).unwrap(), e).unwrap();
        let d = direct_inverse(&h, e);
        prop_assert!((&g - &d).frobenius_norm() <= 1e-10 * d.frobenius_norm());
    }

    #[test]
    fn shift_covariance(seed in any::<u64>(), n in 1usize..=8, re in -2.0f64..2.0, im in -2.0f64..2.0) {
        let h = complex_normal(n, &mut ChaCha8Rng::seed_from_u64(seed));
        let omega = C64::new(re, im);
        let a = flv_modes(&h, omega).unwrap();
        let b = flv_modes(&h.shifted(omega), zero()).unwrap();
        for (x, y) in a.modes().iter().zip(b.modes()) {
            prop_assert_eq!(x.max_abs_diff(y), 0.0);
        }
        prop_assert_eq!(a.coeffs(), b.coeffs());
    }

    #[test]
    fn coefficient_identities(seed in any::<u64>(), n in 1usize..=8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = complex_normal(n, &mut rng);
        let modes = flv_modes(&h, zero()).unwrap();
        let det = h.as_mat().determinant();
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        prop_assert!((modes.coeffs()[0] - det * sign).norm() <= 1e-8 * det.norm().max(1.0));
        prop_assert_eq!(modes.coeffs()[n], C64::new(1.0, 0.0));
        for _ in 0..10 {
            let l = C64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            let direct = h.scale(C64::new(-1.0, 0.0)).shifted(-l).as_mat().determinant();
            prop_assert!((modes.char_poly(l) - direct).norm() <= 1e-8 * direct.norm().max(1.0));
        }
    }

    #[test]
    fn eig_reconstruction(seed in any::<u64>(), n in 2usize..=8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = complex_normal(n, &mut rng);
        let norm = spectral_norm(&h).unwrap();
        let ev = eigenvalues(&h).unwrap();
        let gap = 10.0 * policy().cluster_radius(norm);
        prop_assume!(ev.iter().enumerate().all(|(i, a)| ev[i + 1..].iter().all(|b| (a - b).norm() > gap)));
        let d = eig(&h, &policy()).unwrap();
        let lam = ComplexMatrix::diagonal(&d.eigenvalues).unwrap();
        let rebuilt = d.right_vectors.matmul(&lam).matmul(&d.left_vectors);
        prop_assert!((&rebuilt - &h).frobenius_norm() <= 1e-8 * norm);
    }

    #[test]
    fn lieb_chiral_and_reciprocity(
        kx in -PI..PI, ky in -PI..PI, eps in 0.1f64..2.0, phi in 0.1f64..3.0, psi in 0.1f64..3.0,
    ) {
        let x = chiral_lieb().matrix;
        for (i, spec) in lieb_specs(eps, phi, psi).iter().enumerate() {
            let h = lieb_bloch(spec, [kx, ky]).unwrap();
            prop_assert!(x.matmul(&h).matmul(&x).max_abs_diff(&h.scale(C64::new(-1.0, 0.0))) <= 1e-14);
            let back = lieb_bloch(spec, [-kx, -ky]).unwrap().transpose();
            let gap = h.max_abs_diff(&back);
            if i == 2 {
                prop_assert!(gap > 1e-6 || (kx.sin().abs() < 1e-3 && ky.sin().abs() < 1e-3));
            } else {
                prop_assert!(gap <= 1e-14);
            }
        }
    }

    #[test]
    fn hodsm_chiral_and_square(kx in -PI..PI, ky in -PI..PI, kz in -PI..PI, eps in 0.0f64..1.0) {
        let x = chiral_dsm().matrix;
        for v in 0..5u8 {
            let h = hodsm_bloch(&HodsmSpec::standard(v, eps), [kx, ky, kz]).unwrap();
            prop_assert!(x.matmul(&h).matmul(&x).max_abs_diff(&h.scale(C64::new(-1.0, 0.0))) <= 1e-14);
        }
        let h = hodsm_bloch(&HodsmSpec::standard(0, 0.0), [kx, ky, kz]).unwrap();
        let h2 = h.matmul(&h);
        let e2 = h2[(0, 0)];
        prop_assert!(h2.max_abs_diff(&ComplexMatrix::identity(4).scale(e2)) <= 1e-13);
    }

    #[test]
    fn closed_dispersions_match_eig(kz in -PI..PI) {
        let eps = [0.0, 0.7071067811865476, 0.7071067811865476, 0.5, 0.3535533905932738];
        for v in 0..5u8 {
            let spec = HodsmSpec::standard(v, eps[v as usize]);
            let closed = hodsm_closed_dispersion(&spec, kz).unwrap();
            let numeric = eigenvalues(&hodsm_bloch(&spec, [0.0, 0.0, kz]).unwrap()).unwrap();
            // Square-root branch points make eigenvalues sensitive like sqrt(eps_mach).
            prop_assert!(same_multiset(&closed, &numeric, 1e-6), "variant {v}: {closed:?} vs {numeric:?}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn hinge_nonhermiticity_is_the_addition(v in 1u8..=4, eps in 0.1f64..1.0, kz in -PI..PI, n in 2usize..=5) {
        let geom = HingeGeometry::square(n, kz);
        let h0 = hinge_hamiltonian(&HodsmSpec::standard(0, 0.0), &geom).unwrap();
        prop_assert_eq!(h0.max_abs_diff(&h0.adjoint()), 0.0);
        let h = hinge_hamiltonian(&HodsmSpec::standard(v, eps), &geom).unwrap();
        let d = &h - &h0;
        // The addition lives inside unit cells only.
        for i in 0..h.n() {
            for j in 0..h.n() {
                if i / 4 != j / 4 {
                    prop_assert_eq!(d[(i, j)], zero());
                }
            }
        }
        let skew = &h - &h.adjoint();
        prop_assert!(skew.max_abs_diff(&(&d - &d.adjoint())) <= 1e-15);
        prop_assert!(skew.max_abs() > 0.0);
    }
}
