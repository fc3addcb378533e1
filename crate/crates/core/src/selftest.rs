//! The ten acceptance checks, runnable from tests and from the CLI.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::adjugate::{flv_modes, greens_modal};
use crate::classify::{classify_point, partial_multiplicities, weyr_oracle, DegeneracyReport, Label};
use crate::matkit::{clusters, eigenvalues, spectral_norm, ComplexMatrix, TolerancePolicy, C64};
use crate::models::{hodsm_bloch, lieb_bloch, two_arccot, Corner, HingeGeometry, HodsmSpec, LiebSpec};
use crate::probes::{
    atomistic_classify, hinge_report, lineshape_exponent, splitting_exponent, Axis, DecayProfiler, HingeOptions,
    SplittingConfig,
};
use crate::scan::{analytic_degeneracies, periodic_distance, trace_ring};
use crate::testgen::{complex_normal, planted_jordan, random_partition};
use crate::ModelSpec;

#[derive(Clone, Debug)]
pub struct CriterionOutcome {
    pub id: u8,
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
    pub elapsed: Duration,
}

impl CriterionOutcome {
    /// `PASS  3 hodsm bulk table (0.12 s): detail`.
    pub fn line(&self) -> String {
        format!(
            "{} {:>2} {} ({:.2} s): {}",
            if self.pass { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.elapsed.as_secs_f64(),
            self.detail
        )
    }
}

type Check = fn(&TolerancePolicy) -> std::result::Result<String, String>;

const CRITERIA: [(u8, &str, Check); 10] = [
    (1, "lieb classification table", lieb_table),
    (2, "reciprocal lieb manifolds", reciprocal_manifolds),
    (3, "hodsm bulk table", hodsm_table),
    (4, "response strengths", response_strengths),
    (5, "mode ranks vs power-rank oracle", oracle_equivalence),
    (6, "resolvent identity", resolvent_identity),
    (7, "exponent laws", exponent_laws),
    (8, "atomistic limit", atomistic_limit),
    (9, "hinge vicinity", hinge_vicinity),
    (10, "corner decay rates", decay_rates),
];

pub fn criterion_names() -> Vec<(u8, &'static str)> {
    CRITERIA.iter().map(|c| (c.0, c.1)).collect()
}

/// Runs one criterion by number.
pub fn run_one(id: u8, policy: &TolerancePolicy) -> Option<CriterionOutcome> {
    let &(id, name, check) = CRITERIA.iter().find(|c| c.0 == id)?;
    let start = Instant::now();
    let res = check(policy);
    let elapsed = start.elapsed();
    let (pass, detail) = match res {
        Ok(d) => (true, d),
        Err(d) => (false, d),
    };
    Some(CriterionOutcome {
        id,
        name,
        pass,
        detail,
        elapsed,
    })
}

pub fn run_all(policy: &TolerancePolicy) -> Vec<CriterionOutcome> {
    CRITERIA.iter().filter_map(|c| run_one(c.0, policy)).collect()
}

fn zero() -> C64 {
    C64::new(0.0, 0.0)
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn fingerprint(h: &ComplexMatrix, policy: &TolerancePolicy) -> std::result::Result<DegeneracyReport, String> {
    classify_point(h, zero(), policy).map_err(|e| e.to_string())
}

fn expect(
    what: &str,
    h: &ComplexMatrix,
    want: (usize, usize, &[usize]),
    policy: &TolerancePolicy,
) -> std::result::Result<DegeneracyReport, String> {
    let r = fingerprint(h, policy).map_err(|e| format!("{what}: {e}"))?;
    ensure((r.alpha, r.gamma, r.partials.as_slice()) == want, || {
        format!("{what}: got ({}, {}, {:?}), want {want:?}", r.alpha, r.gamma, r.partials)
    })?;
    Ok(r)
}

fn lieb_table(p: &TolerancePolicy) -> std::result::Result<String, String> {
    let err = |e: crate::Error| e.to_string();
    expect("hermitian (pi,pi)", &lieb_bloch(&LiebSpec::Hermitian, [PI, PI]).map_err(err)?, (3, 3, &[1, 1, 1]), p)?;
    let k0 = 2.0 * PI / 3.0;
    for (a, b) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
        let h = lieb_bloch(&LiebSpec::NhSymmetric { epsilon: 1.0 }, [a * k0, b * k0]).map_err(err)?;
        expect("nh-symmetric", &h, (3, 1, &[3]), p)?;
    }
    let spec = LiebSpec::MinimalFep { epsilon: 1.0 };
    expect("minimal-fep (pi,pi)", &lieb_bloch(&spec, [PI, PI]).map_err(err)?, (3, 2, &[2, 1]), p)?;
    let a = two_arccot(0.5);
    expect("minimal-fep EP3", &lieb_bloch(&spec, [a, -a]).map_err(err)?, (3, 1, &[3]), p)?;
    Ok("7 points integer-exact".into())
}

fn reciprocal_manifolds(p: &TolerancePolicy) -> std::result::Result<String, String> {
    let err = |e: crate::Error| e.to_string();
    // Isolated points.
    let (psi, phi) = (3.0 * PI / 4.0, PI / 2.0);
    let spec = LiebSpec::Reciprocal { phi, psi };
    let cat = analytic_degeneracies(&ModelSpec::Lieb(spec.clone())).map_err(err)?;
    let want = [
        ([psi, phi], Label::Fragmented),
        ([-psi, -phi], Label::Fragmented),
        ([psi, -phi], Label::Exceptional(3)),
        ([-psi, phi], Label::Exceptional(3)),
    ];
    ensure(cat.len() == 4, || format!("catalog has {} entries", cat.len()))?;
    for (k, label) in want {
        ensure(cat.iter().any(|a| periodic_distance(&a.k, &k) <= 1e-8 && a.label == label), || {
            format!("catalog misses {label} at {k:?}")
        })?;
        let r = fingerprint(&lieb_bloch(&spec, k).map_err(err)?, p)?;
        ensure(r.label == label && r.alpha == 3, || format!("{k:?}: got {} alpha {}", r.label, r.alpha))?;
    }

    let ring = |phi: f64| -> std::result::Result<(usize, Vec<Vec<f64>>), String> {
        let s = trace_ring(&LiebSpec::Reciprocal { phi, psi: phi }, 64, p).map_err(err)?;
        ensure(s.len() == 64, || format!("{} samples", s.len()))?;
        let mut ep3 = 0;
        let mut feps = Vec::new();
        for m in &s {
            let r = m.report.as_ref().ok_or_else(|| format!("{:?}: {}", m.k, m.error.clone().unwrap_or_default()))?;
            ensure(r.alpha == 3, || format!("alpha {} at {:?}", r.alpha, m.k))?;
            match r.label {
                Label::Exceptional(3) => ep3 += 1,
                Label::Fragmented => feps.push(m.k.clone()),
                l => return Err(format!("unexpected {l} at {:?}", m.k)),
            }
        }
        Ok((ep3, feps))
    };
    let on = |feps: &[Vec<f64>], c: f64| {
        feps.len() == 2
            && [[c, c], [-c, -c]]
                .iter()
                .all(|t| feps.iter().any(|k| periodic_distance(k, t) <= 1e-8))
    };
    let (ep3, feps) = ring(PI / 4.0)?;
    ensure(ep3 == 62 && on(&feps, PI / 4.0), || format!("ring: {ep3} EP3, FEPs {feps:?}"))?;
    let (_, feps) = ring(PI / 2.0)?;
    ensure(on(&feps, PI / 2.0), || format!("lines: FEPs {feps:?}"))?;
    Ok("2 FEP + 2 EP3 isolated; ring 62 EP3 + 2 FEP; lines FEPs at ±(π/2,π/2)".into())
}

/// ε per variant at the reference degeneracies.
const REFERENCE_EPS: [f64; 5] = [0.0, FRAC_1_SQRT_2, FRAC_1_SQRT_2, 0.5, 0.353_553_390_593_273_8];

fn bulk(v: u8, kz: f64) -> std::result::Result<ComplexMatrix, String> {
    hodsm_bloch(&HodsmSpec::standard(v, REFERENCE_EPS[v as usize]), [0.0, 0.0, kz]).map_err(|e| e.to_string())
}

fn hodsm_table(p: &TolerancePolicy) -> std::result::Result<String, String> {
    let q = PI / 4.0;
    let half = [2.0 * q, -2.0 * q];
    let quarter = [q, -q, 3.0 * q, -3.0 * q];
    let three = [3.0 * q, -3.0 * q];
    let rows: [(u8, &[f64], (usize, usize, &[usize])); 9] = [
        (0, &half, (4, 4, &[1, 1, 1, 1])),
        (1, &half, (2, 2, &[1, 1])),
        (1, &quarter, (4, 1, &[4])),
        (2, &half, (4, 2, &[3, 1])),
        (2, &three, (4, 2, &[3, 1])),
        (3, &half, (4, 2, &[2, 2])),
        (3, &quarter, (2, 1, &[2])),
        (4, &half, (4, 3, &[2, 1, 1])),
        (4, &three, (2, 1, &[2])),
    ];
    let mut n = 0;
    for (v, kzs, want) in rows {
        for &kz in kzs {
            expect(&format!("variant {v} kz {kz:.4}"), &bulk(v, kz)?, want, p)?;
            n += 1;
        }
    }
    Ok(format!("{n} points integer-exact"))
}

fn response_strengths(p: &TolerancePolicy) -> std::result::Result<String, String> {
    let r = fingerprint(&bulk(3, PI / 2.0)?, p)?;
    let (eta, xi) = (r.eta.unwrap_or(f64::NAN), r.xi.unwrap_or(f64::NAN));
    ensure((eta - 0.707_106_8).abs() <= 1e-6, || format!("eta = {eta}"))?;
    ensure((xi - 0.5).abs() <= 1e-6, || format!("xi = {xi}"))?;
    ensure((eta / xi - 2f64.sqrt()).abs() <= 1e-6, || format!("eta/xi = {}", eta / xi))?;

    let err = |e: crate::Error| e.to_string();
    let mut rank_one = Vec::new();
    let k0 = 2.0 * PI / 3.0;
    rank_one.push(lieb_bloch(&LiebSpec::NhSymmetric { epsilon: 1.0 }, [k0, k0]).map_err(err)?);
    let a = two_arccot(0.5);
    rank_one.push(lieb_bloch(&LiebSpec::MinimalFep { epsilon: 1.0 }, [a, -a]).map_err(err)?);
    for kz in [PI / 4.0, 3.0 * PI / 4.0] {
        rank_one.push(bulk(1, kz)?);
        rank_one.push(bulk(3, kz)?);
    }
    rank_one.push(bulk(4, 3.0 * PI / 4.0)?);
    let mut checked = 0;
    for h in &rank_one {
        let r = fingerprint(h, p)?;
        let lead = r.mode_ranks.get(r.alpha - r.ell).copied();
        ensure(lead == Some(1), || format!("{}: leading mode rank {lead:?}", r.label))?;
        let (eta, xi) = (r.eta.unwrap_or(f64::NAN), r.xi.unwrap_or(f64::NAN));
        ensure((eta - xi).abs() <= 1e-10 * eta, || format!("{}: eta {eta} xi {xi}", r.label))?;
        checked += 1;
    }
    Ok(format!("eta = {eta:.9}, xi = {xi:.9}; eta = xi at {checked} rank-1 points"))
}

/// Structures with at most `n_max` rows in total.
fn planted_batch(count: usize, n_max: usize, seed: u64, cond: f64) -> Vec<crate::testgen::PlantedJordan> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let sizes = random_partition(n_max, &mut rng);
            let used: usize = sizes.iter().sum();
            let extra = rng.gen_range(0..=n_max - used);
            planted_jordan(&sizes, extra, cond, &mut rng)
        })
        .collect()
}

/// Checks mode ranks and the oracle against the planted structure.
pub fn check_planted(pj: &crate::testgen::PlantedJordan, p: &TolerancePolicy) -> std::result::Result<(), String> {
    let modes = flv_modes(&pj.h, zero()).map_err(|e| e.to_string())?;
    let alpha = crate::classify::algebraic_multiplicity(&modes, p);
    let from_modes = partial_multiplicities(&modes, alpha, p).map_err(|e| e.to_string())?;
    let oracle = weyr_oracle(&pj.h, p).map_err(|e| e.to_string())?;
    ensure(from_modes == pj.beta && oracle == pj.beta, || {
        format!("planted {}, modes {from_modes}, oracle {oracle}", pj.beta)
    })
}

fn oracle_equivalence(p: &TolerancePolicy) -> std::result::Result<String, String> {
    for (i, pj) in planted_batch(500, 8, 0x0a11_5eed, 1.0).iter().enumerate() {
        check_planted(pj, p).map_err(|e| format!("sample {i}: {e}"))?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(16);
    let pj = planted_jordan(&[4, 4, 3, 2, 2, 1], 0, 1.0, &mut rng);
    let oracle = weyr_oracle(&pj.h, p).map_err(|e| e.to_string())?;
    ensure(oracle == pj.beta && oracle.alpha() == 16 && oracle.gamma() == 6, || {
        format!("n=16 example: oracle {oracle}")
    })?;
    let modes = flv_modes(&pj.h, zero()).map_err(|e| e.to_string())?;
    let alpha = crate::classify::algebraic_multiplicity(&modes, p);
    let from_modes = partial_multiplicities(&modes, alpha, p).map_err(|e| e.to_string())?;
    ensure(from_modes == pj.beta, || format!("n=16 example: modes {from_modes}"))?;
    Ok("500/500 agree; (4,4,3,2,2,1) gives alpha 16, gamma 6".into())
}

fn resolvent_identity(p: &TolerancePolicy) -> std::result::Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x6e55);
    let mut worst: f64 = 0.0;
    let mut done = 0;
    while done < 100 {
        let n = rng.gen_range(2..=8);
        let h = complex_normal(n, &mut rng);
        let omega = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let e = C64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let ev = eigenvalues(&h).map_err(|e| e.to_string())?;
        let radius = p.cluster_radius(spectral_norm(&h).map_err(|e| e.to_string())?);
        if ev.iter().any(|l| (l - e).norm() < radius) {
            continue;
        }
        let modes = flv_modes(&h, omega).map_err(|e| e.to_string())?;
        let g = greens_modal(&modes, e).map_err(|e| e.to_string())?;
        let direct = direct_inverse(&h, e);
        worst = worst.max((&g - &direct).frobenius_norm() / direct.frobenius_norm());
        done += 1;
    }
    ensure(worst <= 1e-10, || format!("worst relative error {worst:.3e}"))?;
    Ok(format!("100 samples, worst relative error {worst:.2e}"))
}

/// `(E − H)^{-1}` by LU.
pub fn direct_inverse(h: &ComplexMatrix, e: C64) -> ComplexMatrix {
    use faer::linalg::solvers::DenseSolveCore;
    let n = h.n();
    let m = faer::Mat::<C64>::from_fn(n, n, |i, j| if i == j { e - h[(i, j)] } else { -h[(i, j)] });
    ComplexMatrix::from_mat_unchecked(m.partial_piv_lu().inverse())
}

fn exponent_laws(p: &TolerancePolicy) -> std::result::Result<String, String> {
    let err = |e: crate::Error| e.to_string();
    let lieb_fep = lieb_bloch(&LiebSpec::MinimalFep { epsilon: 1.0 }, [PI, PI]).map_err(err)?;
    let diag = ComplexMatrix::diagonal(&[C64::new(1.0, 0.0), C64::new(2.0, 0.0)]).map_err(err)?;
    let mut out = Vec::new();
    let line_cases = [
        (diag, C64::new(1.0, 0.0), 1),
        (lieb_fep.clone(), zero(), 2),
        (bulk(2, PI / 2.0)?, zero(), 3),
        (bulk(1, PI / 4.0)?, zero(), 4),
    ];
    for (h, e, ell) in line_cases {
        let fit = lineshape_exponent(&h, e, ell, (1e-3, 1e-2), 20, p).map_err(err)?;
        ensure(fit.within(0.02) && fit.r_squared >= 0.99, || format!("lineshape ell {ell}: {fit:?}"))?;
        out.push(format!("{:.3}", fit.slope));
    }
    let split_cases = [(bulk(1, PI / 4.0)?, 4), (lieb_fep, 2), (bulk(1, PI / 2.0)?, 1)];
    for (h, ell) in split_cases {
        let fit = splitting_exponent(&h, zero(), ell, &SplittingConfig::default(), p).map_err(err)?;
        ensure(fit.within(0.05) && fit.r_squared >= 0.99, || format!("splitting ell {ell}: {fit:?}"))?;
        out.push(format!("{:.4}", fit.slope));
    }
    Ok(format!("lineshape slopes {}; splitting slopes {}", out[..4].join(", "), out[4..].join(", ")))
}

fn atomistic_limit(p: &TolerancePolicy) -> std::result::Result<String, String> {
    let err = |e: crate::Error| e.to_string();
    let want: [(u8, &[usize]); 5] = [(0, &[1, 1, 1, 1]), (1, &[1, 1]), (2, &[3, 1]), (3, &[2, 2]), (4, &[2, 1, 1])];
    for (v, partials) in want {
        let spec = HodsmSpec::new(v, -0.5, 1.0, REFERENCE_EPS[v as usize]).map_err(err)?;
        let r = atomistic_classify(&spec, &HingeGeometry::square(3, 0.0), p).map_err(err)?;
        ensure(r.report.partials == partials, || format!("variant {v}: {:?}", r.report.partials))?;
    }
    let spec = HodsmSpec::new(1, -0.5, 1.0, REFERENCE_EPS[1]).map_err(err)?;
    let mut pair = Vec::new();
    for ny in [3, 5, 7, 9] {
        let r = atomistic_classify(&spec, &HingeGeometry { nx: 3, ny, kz: 0.0 }, p).map_err(err)?;
        let e = r.lowest_nonzero.first().map(|z| z.norm()).unwrap_or(f64::NAN);
        ensure(e < spec.s.abs(), || format!("ny {ny}: |E| = {e}"))?;
        pair.push(e);
    }
    ensure(pair.windows(2).all(|w| w[1] < w[0]), || format!("pair |E| not decreasing: {pair:?}"))?;
    Ok(format!("partials match; variant 1 pair |E| {:.4} -> {:.4}", pair[0], pair[3]))
}

fn hinge_vicinity(p: &TolerancePolicy) -> std::result::Result<String, String> {
    let err = |e: crate::Error| e.to_string();
    let want = [4, 1, 2, 2, 3];
    let geom = HingeGeometry::square(20, 0.0);
    let mut ranks = Vec::new();
    for v in 0..5u8 {
        let spec = HodsmSpec::standard(v, REFERENCE_EPS[v as usize]);
        let r = hinge_report(&spec, &geom, &HingeOptions::default(), p).map_err(err)?;
        let gap = r.gap_ratio.unwrap_or(0.0);
        ensure(r.gram_rank == want[v as usize], || format!("variant {v}: gram rank {}", r.gram_rank))?;
        ensure(gap >= 5.0, || format!("variant {v}: gap ratio {gap}"))?;
        if v == 0 {
            let norm = r.eigenvalues.iter().map(|e| e.norm()).fold(0.0, f64::max);
            let odd = clusters(&r.eigenvalues, p.cluster_radius(norm))
                .iter()
                .filter(|c| c.len() % 2 == 1)
                .count();
            ensure(odd == 0, || format!("{odd} eigenvalue clusters of odd size"))?;
        }
        ranks.push(r.gram_rank.to_string());
    }
    Ok(format!("gram ranks {}; gaps >= 5; Kramers pairing holds", ranks.join("/")))
}

fn decay_rates(_p: &TolerancePolicy) -> std::result::Result<String, String> {
    let err = |e: crate::Error| e.to_string();
    let mut fits = Vec::new();
    let geom = |axis| match axis {
        Axis::X => HingeGeometry { nx: 30, ny: 12, kz: 0.0 },
        Axis::Y => HingeGeometry { nx: 12, ny: 30, kz: 0.0 },
    };
    let h0 = HodsmSpec::standard(0, 0.0);
    let nh1 = HodsmSpec::standard(1, 0.25);
    for axis in [Axis::X, Axis::Y] {
        let prof = DecayProfiler::new(&h0, &geom(axis), 4096).map_err(err)?;
        for c in Corner::ALL {
            fits.push((format!("v0 {c} {axis:?}"), prof.fit(c, axis).map_err(err)?.ratio, 0.5));
        }
        let prof = DecayProfiler::new(&nh1, &geom(axis), 4096).map_err(err)?;
        let want = if axis == Axis::Y { 0.25 } else { 0.5 };
        fits.push((format!("v1 B {axis:?}"), prof.fit(Corner::B, axis).map_err(err)?.ratio, want));
    }
    for (what, got, want) in &fits {
        ensure((got - want).abs() <= 0.1 * want, || format!("{what}: ratio {got} vs {want}"))?;
    }
    let v1: Vec<String> = fits.iter().filter(|f| f.0.starts_with("v1")).map(|f| format!("{} {:.4}", f.0, f.1)).collect();
    Ok(format!("v0 ratios within 10% of 0.5 at all corners; {}", v1.join(", ")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fast_criteria_pass() {
        let p = TolerancePolicy::default();
        for id in [1, 2, 3, 4, 6] {
            let o = run_one(id, &p).unwrap();
            assert!(o.pass, "{}", o.line());
        }
        assert!(run_one(11, &p).is_none());
    }
}
