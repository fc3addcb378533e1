//! Numerical checks of the symmetries and sum rules of the models.

use std::f64::consts::PI;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::matkit::{clusters, eigenvalues, spectral_norm, ComplexMatrix, TolerancePolicy};
use crate::models::symmetry::{chiral_dsm, chiral_dsm_open, chiral_lieb, generalized_reflection, rotation_c4};
use crate::models::{hinge_hamiltonian, HingeGeometry, ModelSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CheckKind {
    /// `X·H·X = −H`.
    Chiral,
    /// `C4·H(kx, ky, kz)·C4ᵀ = H(ky, −kx, kz)`.
    RotationC4,
    /// `R·H·Rᵀ = H` with `R = Z_C·R_a` on a square open system.
    Reflection,
    /// `R·Hᵀ·Rᵀ = H`.
    Transposition,
    /// `(H²)_{BA} = 0` on the open system.
    SumRuleBa,
    /// `(H²)_{CD} = 0` on the open system.
    SumRuleCd,
    /// Every eigenvalue of the open system has even multiplicity.
    Kramers,
}

impl CheckKind {
    pub const ALL: [CheckKind; 7] = [
        CheckKind::Chiral,
        CheckKind::RotationC4,
        CheckKind::Reflection,
        CheckKind::Transposition,
        CheckKind::SumRuleBa,
        CheckKind::SumRuleCd,
        CheckKind::Kramers,
    ];

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.to_string() == s)
    }
}

impl fmt::Display for CheckKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CheckKind::Chiral => "chiral",
            CheckKind::RotationC4 => "rotation-c4",
            CheckKind::Reflection => "reflection",
            CheckKind::Transposition => "transposition",
            CheckKind::SumRuleBa => "sum-rule-ba",
            CheckKind::SumRuleCd => "sum-rule-cd",
            CheckKind::Kramers => "kramers",
        })
    }
}

/// HODSM variants for which each open-system identity holds.
pub fn expected_to_hold(kind: CheckKind, variant: u8) -> bool {
    match kind {
        CheckKind::Chiral => true,
        CheckKind::RotationC4 | CheckKind::Kramers => variant == 0,
        CheckKind::Reflection | CheckKind::SumRuleCd => variant == 0 || variant == 4,
        CheckKind::Transposition | CheckKind::SumRuleBa => variant == 0 || variant == 2,
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SymmetryVerdict {
    pub kind: CheckKind,
    pub pass: bool,
    /// Largest violation: a max-entry residual, or for Kramers the number
    /// of odd-sized eigenvalue clusters.
    pub witness: f64,
    pub tolerance: f64,
}

const SAMPLES: usize = 16;

fn sample_ks(dims: usize) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(0xc41a1);
    (0..SAMPLES)
        .map(|_| (0..dims).map(|_| rng.gen_range(-PI..PI)).collect())
        .collect()
}

fn verdict(kind: CheckKind, witness: f64, tolerance: f64) -> SymmetryVerdict {
    SymmetryVerdict {
        kind,
        pass: witness <= tolerance,
        witness,
        tolerance,
    }
}

fn scale(h: &ComplexMatrix, degree: i32) -> f64 {
    (1.0 + h.max_abs()).powi(degree)
}

/// Largest entry of `(H²)` between two sublattices of the open system.
fn sum_rule_residual(h: &ComplexMatrix, row_site: usize, col_site: usize) -> f64 {
    let h2 = h.matmul(h);
    let n = h.n();
    let mut worst = 0.0f64;
    for i in (row_site..n).step_by(4) {
        for j in (col_site..n).step_by(4) {
            worst = worst.max(h2[(i, j)].norm());
        }
    }
    worst
}

/// Checks one symmetry or sum rule. Identities pass when their residual
/// is at most `1e-10` times the natural scale. Open-system kinds need a
/// geometry; Kramers pairing needs the Hermitian HODSM.
pub fn symmetry_check(
    model: &ModelSpec,
    geom: Option<&HingeGeometry>,
    kind: CheckKind,
    policy: &TolerancePolicy,
) -> Result<SymmetryVerdict> {
    policy.validate()?;
    let inapplicable = |why: &str| Err(Error::Inapplicable(format!("{kind} on {}: {why}", model.id())));
    match (model, kind) {
        (ModelSpec::Lieb(_), CheckKind::Chiral) => {
            let x = chiral_lieb().matrix;
            let mut worst: f64 = 0.0;
            let mut tol: f64 = 0.0;
            for k in sample_ks(2) {
                let h = model.bloch(&k)?;
                worst = worst.max((&x.matmul(&h).matmul(&x) + &h).max_abs());
                tol = tol.max(1e-10 * scale(&h, 1));
            }
            Ok(verdict(kind, worst, tol))
        }
        (ModelSpec::Lieb(_), _) => inapplicable("only the chiral check applies to Lieb models"),
        (ModelSpec::Hodsm(spec), CheckKind::Chiral) => {
            let mut worst: f64 = 0.0;
            let mut tol: f64 = 0.0;
            match geom {
                Some(g) => {
                    let h = hinge_hamiltonian(spec, g)?;
                    let x = chiral_dsm_open(g).matrix;
                    worst = (&x.matmul(&h).matmul(&x) + &h).max_abs();
                    tol = 1e-10 * scale(&h, 1);
                }
                None => {
                    let x = chiral_dsm().matrix;
                    for k in sample_ks(3) {
                        let h = model.bloch(&k)?;
                        worst = worst.max((&x.matmul(&h).matmul(&x) + &h).max_abs());
                        tol = tol.max(1e-10 * scale(&h, 1));
                    }
                }
            }
            Ok(verdict(kind, worst, tol))
        }
        (ModelSpec::Hodsm(_), CheckKind::RotationC4) => {
            let c4 = rotation_c4().matrix;
            let c4t = c4.transpose();
            let mut worst: f64 = 0.0;
            let mut tol: f64 = 0.0;
            for k in sample_ks(3) {
                let h = model.bloch(&k)?;
                let rotated = model.bloch(&[k[1], -k[0], k[2]])?;
                worst = worst.max((&c4.matmul(&h).matmul(&c4t) - &rotated).max_abs());
                tol = tol.max(1e-10 * scale(&h, 1));
            }
            Ok(verdict(kind, worst, tol))
        }
        (ModelSpec::Hodsm(spec), _) => {
            let Some(g) = geom else {
                return inapplicable("needs an open-system geometry");
            };
            let h = hinge_hamiltonian(spec, g)?;
            match kind {
                CheckKind::Reflection | CheckKind::Transposition => {
                    let r = generalized_reflection(g)?.matrix;
                    let src = if kind == CheckKind::Reflection { h.clone() } else { h.transpose() };
                    let w = (&r.matmul(&src).matmul(&r.transpose()) - &h).max_abs();
                    Ok(verdict(kind, w, 1e-10 * scale(&h, 1)))
                }
                CheckKind::SumRuleBa => Ok(verdict(kind, sum_rule_residual(&h, 1, 0), 1e-10 * scale(&h, 2))),
                CheckKind::SumRuleCd => Ok(verdict(kind, sum_rule_residual(&h, 2, 3), 1e-10 * scale(&h, 2))),
                CheckKind::Kramers => {
                    if spec.variant != 0 {
                        return inapplicable("Kramers pairing is a property of the Hermitian model");
                    }
                    let radius = policy.cluster_radius(spectral_norm(&h)?);
                    let ev = eigenvalues(&h)?;
                    let odd = clusters(&ev, radius).iter().filter(|c| c.len() % 2 == 1).count();
                    Ok(verdict(kind, odd as f64, 0.0))
                }
                CheckKind::Chiral | CheckKind::RotationC4 => unreachable!("handled above"),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{HodsmSpec, LiebSpec};

    #[test]
    fn names_round_trip() {
        for k in CheckKind::ALL {
            assert_eq!(CheckKind::parse(&k.to_string()), Some(k));
        }
    }

    #[test]
    fn lieb_chiral_and_inapplicable_kinds() {
        let m = ModelSpec::Lieb(LiebSpec::MinimalFep { epsilon: 1.0 });
        let p = TolerancePolicy::default();
        assert!(symmetry_check(&m, None, CheckKind::Chiral, &p).unwrap().pass);
        assert!(matches!(
            symmetry_check(&m, None, CheckKind::Kramers, &p),
            Err(Error::Inapplicable(_))
        ));
    }

    #[test]
    fn sum_rule_fails_with_witness_for_variant_one() {
        let m = ModelSpec::Hodsm(HodsmSpec::standard(1, std::f64::consts::FRAC_1_SQRT_2));
        let g = HingeGeometry::square(5, 0.3);
        let v = symmetry_check(&m, Some(&g), CheckKind::SumRuleBa, &TolerancePolicy::default()).unwrap();
        assert!(!v.pass);
        assert!(v.witness > 0.1);
    }
}
