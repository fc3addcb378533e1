//! Open-boundary probes: hinge-state spectra and overlaps, the atomistic
//! limit, and corner decay rates.

use faer::Mat;

use crate::classify::{classify_point_with, DegeneracyReport, Route};
use crate::error::{Error, Result};
use crate::matkit::{eig_right, singular_values, spectral_norm, ComplexMatrix, TolerancePolicy, C64};
use crate::models::{hinge_hamiltonian, Corner, HingeGeometry, HodsmSpec};
use crate::probes::exponents::fit_line;

/// Largest open-system dimension diagonalized by default.
pub const DEFAULT_EIG_CAP: usize = 4096;
/// Overlap scale separating parallel from independent hinge states.
pub const DEFAULT_GRAM_THRESHOLD: f64 = 0.1;

#[derive(Clone, Debug, PartialEq)]
pub struct HingeReport {
    pub kz: f64,
    pub nx: usize,
    pub ny: usize,
    /// Full spectrum sorted by (real, imaginary).
    pub eigenvalues: Vec<C64>,
    /// Indices of the four smallest `|E|`, in increasing `|E|`.
    pub low_set: Vec<usize>,
    /// `|E₅|/|E₄|`; absent when the system has fewer than five states.
    pub gap_ratio: Option<f64>,
    /// `|⟨u_i, u_j⟩|` over the low set.
    pub gram: Vec<Vec<f64>>,
    pub gram_rank: usize,
    /// Singular values of the Gram matrix below `gram_threshold·σ_max`
    /// count as zero. A calibration choice, not a derived quantity.
    pub gram_threshold: f64,
    /// Per low-set state, `intensity[x][y]` summed over the four sites.
    pub intensity_maps: Vec<Vec<Vec<f64>>>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HingeOptions {
    pub gram_threshold: f64,
    pub eig_cap: usize,
}

impl Default for HingeOptions {
    fn default() -> Self {
        Self {
            gram_threshold: DEFAULT_GRAM_THRESHOLD,
            eig_cap: DEFAULT_EIG_CAP,
        }
    }
}

fn by_abs(ev: &[C64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..ev.len()).collect();
    order.sort_by(|&a, &b| ev[a].norm().total_cmp(&ev[b].norm()).then(a.cmp(&b)));
    order
}

fn column(u: &ComplexMatrix, j: usize) -> Vec<C64> {
    (0..u.n()).map(|i| u[(i, j)]).collect()
}

fn dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn intensity(geom: &HingeGeometry, v: &[C64]) -> Vec<Vec<f64>> {
    let total: f64 = v.iter().map(|z| z.norm_sqr()).sum();
    (0..geom.nx)
        .map(|x| {
            (0..geom.ny)
                .map(|y| (0..4).map(|a| v[geom.site(x, y, a)].norm_sqr()).sum::<f64>() / total)
                .collect()
        })
        .collect()
}

fn check_cap(geom: &HingeGeometry, cap: usize) -> Result<()> {
    geom.validate()?;
    if geom.dim() > cap {
        return Err(Error::TooLarge { n: geom.dim(), cap });
    }
    Ok(())
}

/// Spectrum, low-set overlaps and intensity maps of the open system.
pub fn hinge_report(
    spec: &HodsmSpec,
    geom: &HingeGeometry,
    options: &HingeOptions,
    policy: &TolerancePolicy,
) -> Result<HingeReport> {
    policy.validate()?;
    if !(options.gram_threshold > 0.0 && options.gram_threshold < 1.0) {
        return Err(Error::InvalidInput("gram threshold must lie in (0, 1)".into()));
    }
    check_cap(geom, options.eig_cap)?;
    let h = hinge_hamiltonian(spec, geom)?;
    let (ev, u) = eig_right(&h)?;
    let order = by_abs(&ev);
    let low: Vec<usize> = order.iter().take(4).copied().collect();
    let gap_ratio = (ev.len() > 4).then(|| ev[order[4]].norm() / ev[order[3]].norm());
    let states: Vec<Vec<C64>> = low.iter().map(|&j| column(&u, j)).collect();
    let gram: Vec<Vec<f64>> = states
        .iter()
        .map(|a| states.iter().map(|b| dot(a, b).norm()).collect())
        .collect();
    let g = ComplexMatrix::from_fn(gram.len(), |i, j| C64::new(gram[i][j], 0.0))?;
    let sv = singular_values(&g)?;
    let gram_rank = sv.iter().filter(|&&s| s > options.gram_threshold * sv[0]).count();
    Ok(HingeReport {
        kz: geom.kz,
        nx: geom.nx,
        ny: geom.ny,
        intensity_maps: states.iter().map(|s| intensity(geom, s)).collect(),
        eigenvalues: ev,
        low_set: low,
        gap_ratio,
        gram,
        gram_rank,
        gram_threshold: options.gram_threshold,
    })
}

/// Zero-energy fingerprint of the open system in the atomistic limit.
#[derive(Clone, Debug, PartialEq)]
pub struct AtomisticReport {
    pub report: DegeneracyReport,
    /// Eigenvalues outside the zero cluster, in increasing `|E|`, at most two.
    pub lowest_nonzero: Vec<C64>,
}

/// Classifies `E = 0` of the hinge matrix at `s·cos kz = −2t`, where the
/// corner sites decouple. The power-rank oracle is used because the
/// dimension exceeds the adjugate-mode limit.
pub fn atomistic_classify(spec: &HodsmSpec, geom: &HingeGeometry, policy: &TolerancePolicy) -> Result<AtomisticReport> {
    policy.validate()?;
    spec.validate()?;
    geom.validate()?;
    let mismatch = spec.s * geom.kz.cos() + 2.0 * spec.t;
    if mismatch.abs() > 1e-12 * (spec.s.abs() + spec.t.abs()) {
        return Err(Error::InvalidInput(format!(
            "atomistic limit needs s*cos(kz) = -2t, off by {mismatch:.3e}"
        )));
    }
    let h = hinge_hamiltonian(spec, geom)?;
    let report = classify_point_with(&h, C64::new(0.0, 0.0), policy, Route::Oracle)?;
    let radius = policy.cluster_radius(spectral_norm(&h)?);
    let ev = crate::matkit::eigenvalues(&h)?;
    let mut nonzero: Vec<C64> = ev.into_iter().filter(|e| e.norm() > radius).collect();
    nonzero.sort_by(|a, b| a.norm().total_cmp(&b.norm()));
    nonzero.truncate(2);
    Ok(AtomisticReport {
        report,
        lowest_nonzero: nonzero,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
}

/// Which decay constant governs a corner state along an axis.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DecayClass {
    /// `q₀`: the Hermitian value.
    Plain,
    /// `q_ε`: enhanced localization.
    Enhanced,
    /// `q_{−ε}`: reduced localization.
    Reduced,
}

/// Decay class of the right hinge state at `corner` along `axis`.
pub fn decay_class(variant: u8, corner: Corner, axis: Axis) -> DecayClass {
    use Axis::*;
    use Corner::*;
    use DecayClass::*;
    match (variant, corner, axis) {
        (1, B, Y) | (2, B, Y) | (2, C, X) | (3, D, X) | (4, C, _) => Enhanced,
        (1, C, Y) | (3, C, X) => Reduced,
        _ => Plain,
    }
}

/// Per-cell amplitude ratio `|−t/s − cos(kz)/2 ∓ ε/s|` predicted for a
/// double-semi-infinite geometry.
pub fn expected_decay_ratio(spec: &HodsmSpec, kz: f64, corner: Corner, axis: Axis) -> f64 {
    let q0 = -spec.t / spec.s - 0.5 * kz.cos();
    let e = spec.eps() / spec.s;
    match decay_class(spec.variant, corner, axis) {
        DecayClass::Plain => q0.abs(),
        DecayClass::Enhanced => (q0 - e).abs(),
        DecayClass::Reduced => (q0 + e).abs(),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DecayFit {
    pub corner: Corner,
    pub axis: Axis,
    /// `exp` of the fitted slope of `log amplitude` per cell.
    pub ratio: f64,
    pub r_squared: f64,
    pub expected: f64,
    /// Weight of the corner state on its corner cell.
    pub corner_weight: f64,
    /// Per-cell amplitude along the edge, normalized to the corner cell.
    pub profile: Vec<f64>,
}

/// Low-energy subspace of one open system, reusable across corners and
/// axes.
pub struct DecayProfiler {
    spec: HodsmSpec,
    geom: HingeGeometry,
    /// Orthonormal basis of the four lowest right states, as columns.
    basis: Vec<Vec<C64>>,
}

impl DecayProfiler {
    pub fn new(spec: &HodsmSpec, geom: &HingeGeometry, cap: usize) -> Result<Self> {
        check_cap(geom, cap)?;
        let h = hinge_hamiltonian(spec, geom)?;
        let (ev, u) = eig_right(&h)?;
        let mut basis: Vec<Vec<C64>> = Vec::new();
        for &j in by_abs(&ev).iter().take(4) {
            let mut v = column(&u, j);
            for b in &basis {
                let c = dot(b, &v);
                v.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
            }
            let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if n > 1e-8 {
                v.iter_mut().for_each(|x| *x /= n);
                basis.push(v);
            }
        }
        Ok(Self {
            spec: *spec,
            geom: *geom,
            basis,
        })
    }

    /// Fits the amplitude decay of the low-energy state concentrated on
    /// `corner` along `axis`. Needs at least 30 cells along the axis.
    pub fn fit(&self, corner: Corner, axis: Axis) -> Result<DecayFit> {
        let g = &self.geom;
        let len = match axis {
            Axis::X => g.nx,
            Axis::Y => g.ny,
        };
        if len < 30 {
            return Err(Error::InvalidInput(format!("need at least 30 cells along the axis, got {len}")));
        }
        let (cx, cy) = g.corner_cell(corner);
        let m = self.basis.len();
        // Restriction of the subspace to the corner cell; its top
        // eigenvector picks the combination living there.
        let rows: Vec<usize> = (0..4).map(|a| g.site(cx, cy, a)).collect();
        let gram = Mat::<C64>::from_fn(m, m, |i, j| {
            rows.iter()
                .map(|&r| self.basis[i][r].conj() * self.basis[j][r])
                .sum()
        });
        let eig = gram
            .self_adjoint_eigen(faer::Side::Lower)
            .map_err(|_| Error::EigenFailed)?;
        let s = eig.S().column_vector();
        let top = (0..m).max_by(|&a, &b| s[a].re.total_cmp(&s[b].re)).ok_or(Error::NoCornerState(corner))?;
        let weight = s[top].re;
        if !(weight > 1e-3) {
            return Err(Error::NoCornerState(corner));
        }
        let coef: Vec<C64> = (0..m).map(|i| eig.U()[(i, top)]).collect();
        let psi: Vec<C64> = (0..g.dim())
            .map(|r| (0..m).map(|i| coef[i] * self.basis[i][r]).sum())
            .collect();
        let cell_amp = |x: usize, y: usize| -> f64 {
            (0..4).map(|a| psi[g.site(x, y, a)].norm_sqr()).sum::<f64>().sqrt()
        };
        let profile: Vec<f64> = (0..len)
            .map(|n| match axis {
                Axis::X => cell_amp(if cx == 0 { n } else { cx - n }, cy),
                Axis::Y => cell_amp(cx, if cy == 0 { n } else { cy - n }),
            })
            .collect();
        let a0 = profile[0];
        let (xs, ys): (Vec<f64>, Vec<f64>) = (1..len / 2)
            .filter(|&n| profile[n] > 1e-9 * a0)
            .map(|n| (n as f64, profile[n].ln()))
            .unzip();
        if xs.len() < 3 {
            return Err(Error::NoCornerState(corner));
        }
        let (slope, _, r2) = fit_line(&xs, &ys)?;
        Ok(DecayFit {
            corner,
            axis,
            ratio: slope.exp(),
            r_squared: r2,
            expected: expected_decay_ratio(&self.spec, g.kz, corner, axis),
            corner_weight: weight,
            profile: profile.iter().map(|p| p / a0).collect(),
        })
    }
}

/// One-shot [`DecayProfiler`] fit.
pub fn decay_rate_fit(spec: &HodsmSpec, geom: &HingeGeometry, corner: Corner, axis: Axis) -> Result<DecayFit> {
    DecayProfiler::new(spec, geom, DEFAULT_EIG_CAP)?.fit(corner, axis)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hermitian_gram_is_full_rank_on_small_system() {
        let r = hinge_report(
            &HodsmSpec::standard(0, 0.0),
            &HingeGeometry::square(6, 0.0),
            &HingeOptions::default(),
            &TolerancePolicy::default(),
        )
        .unwrap();
        assert_eq!(r.low_set.len(), 4);
        assert_eq!(r.gram_rank, 4);
        for map in &r.intensity_maps {
            let total: f64 = map.iter().flatten().sum();
            assert!((total - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn cap_is_enforced() {
        let opts = HingeOptions {
            eig_cap: 64,
            ..HingeOptions::default()
        };
        let err = hinge_report(
            &HodsmSpec::standard(0, 0.0),
            &HingeGeometry::square(5, 0.0),
            &opts,
            &TolerancePolicy::default(),
        );
        assert!(matches!(err, Err(Error::TooLarge { .. })));
    }

    #[test]
    fn atomistic_parameters_are_checked() {
        let spec = HodsmSpec::standard(0, 0.0);
        assert!(atomistic_classify(&spec, &HingeGeometry::square(3, 0.0), &TolerancePolicy::default()).is_err());
    }

    #[test]
    fn decay_table_entries() {
        let spec = HodsmSpec::standard(1, 0.25);
        assert_eq!(expected_decay_ratio(&spec, 0.0, Corner::B, Axis::Y), 0.25);
        assert_eq!(expected_decay_ratio(&spec, 0.0, Corner::B, Axis::X), 0.5);
        assert_eq!(expected_decay_ratio(&spec, 0.0, Corner::C, Axis::Y), 0.75);
        assert_eq!(decay_class(0, Corner::C, Axis::X), DecayClass::Plain);
    }

    #[test]
    fn short_axis_is_rejected() {
        let p = DecayProfiler::new(&HodsmSpec::standard(0, 0.0), &HingeGeometry { nx: 8, ny: 8, kz: 0.0 }, 4096).unwrap();
        assert!(p.fit(Corner::B, Axis::X).is_err());
    }
}
