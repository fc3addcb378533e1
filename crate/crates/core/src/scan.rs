//! Brillouin-zone search for zero-energy degeneracies, their refinement, the
//! closed-form catalog of known locations, and tracing of exceptional rings.
//!
//! The detector is the coefficient `c_g` of `det(λ − H(k))`, where `g` is the
//! generic nullity of the model (1 for Lieb because of the flat band, 0 for
//! HODSM). It vanishes exactly where an additional band reaches `E = 0`, is
//! smooth in `k`, and does not suffer from the `ε^{1/n}` blurring of
//! eigenvalues near an EPn.

use std::cmp::Ordering;
use std::f64::consts::PI;

use faer::linalg::solvers::DenseSolveCore;
use faer::Mat;
use rayon::prelude::*;

use crate::adjugate::char_poly_coeffs;
use crate::classify::{classify_point, DegeneracyReport, Label, PartialMultiplicityFunction};
use crate::error::{Error, Result};
use crate::matkit::{spectral_norm, svd, ComplexMatrix, TolerancePolicy, C64};
use crate::models::{lieb_case, two_arccot, HodsmSpec, LiebCaseReport, LiebSpec, ModelSpec};

const TWO_PI: f64 = 2.0 * PI;
const MAX_ITER: usize = 100;
const FD_STEP: f64 = 1e-6;
/// Stage-one early exit, relative to `(1+‖H‖₂)^{N−g}`.
const ACCEPT_REL: f64 = 1e-14;
/// A refined root must satisfy `|c_g| ≤ REFINED_REL·(1+‖H‖₂)^{N−g}`.
pub const REFINED_REL: f64 = 1e-10;
/// Singular values below this fraction of `1+‖H‖₂` take part in polishing.
const SMALL_SIGMA_REL: f64 = 1e-2;

/// Uniform periodic grid over the zone, `resolution` points per axis
/// starting at the lower end of each range.
#[derive(Clone, Debug, PartialEq)]
pub struct ScanGrid {
    pub dims: usize,
    pub resolution: usize,
    pub ranges: Vec<(f64, f64)>,
}

impl ScanGrid {
    pub fn new(dims: usize, resolution: usize) -> Result<Self> {
        let g = Self {
            dims,
            resolution,
            ranges: vec![(-PI, PI); dims],
        };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dims == 2 || self.dims == 3) {
            return Err(Error::InvalidInput(format!("grid must be 2D or 3D, got {}", self.dims)));
        }
        if self.resolution < 8 {
            return Err(Error::InvalidInput(format!(
                "resolution must be at least 8, got {}",
                self.resolution
            )));
        }
        if self.ranges.len() != self.dims || self.ranges.iter().any(|&(a, b)| !(a.is_finite() && b.is_finite() && a < b)) {
            return Err(Error::InvalidInput("grid ranges must be finite and increasing".into()));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.resolution.pow(self.dims as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    fn step(&self, axis: usize) -> f64 {
        let (a, b) = self.ranges[axis];
        (b - a) / self.resolution as f64
    }

    fn index(&self, flat: usize) -> Vec<usize> {
        let mut rest = flat;
        let mut idx = vec![0; self.dims];
        for d in (0..self.dims).rev() {
            idx[d] = rest % self.resolution;
            rest /= self.resolution;
        }
        idx
    }

    fn flat(&self, idx: &[usize]) -> usize {
        idx.iter().fold(0, |acc, &i| acc * self.resolution + i)
    }

    pub fn point(&self, flat: usize) -> Vec<f64> {
        self.index(flat)
            .iter()
            .enumerate()
            .map(|(d, &i)| self.ranges[d].0 + i as f64 * self.step(d))
            .collect()
    }

    /// Length of one cell diagonal.
    pub fn cell_diagonal(&self) -> f64 {
        (0..self.dims).map(|d| self.step(d).powi(2)).sum::<f64>().sqrt()
    }

    /// Whether the grid covers whole periods, so neighbors wrap around.
    fn periodic(&self) -> bool {
        self.ranges
            .iter()
            .all(|&(a, b)| ((b - a) - TWO_PI).abs() <= 1e-12)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DegeneracyCandidate {
    pub k: Vec<f64>,
    /// The `(g+1)`-th smallest `|E|` at `k`.
    pub min_abs_energy: f64,
    /// `|c_g(k)|`.
    pub residual: f64,
    pub refined: bool,
    pub iterations: usize,
    /// Set by [`bz_scan`] when a catalog exists: the point matches no
    /// catalog entry.
    pub off_catalog: Option<bool>,
    pub report: Option<DegeneracyReport>,
    pub classification_error: Option<String>,
}

/// Maps an angle into `(−π, π]`.
pub fn wrap_angle(x: f64) -> f64 {
    let mut w = x.rem_euclid(TWO_PI);
    if w > PI {
        w -= TWO_PI;
    }
    if w <= -PI + 1e-12 {
        w += TWO_PI;
    }
    w
}

pub fn canonical_k(k: &[f64]) -> Vec<f64> {
    k.iter().map(|&x| wrap_angle(x)).collect()
}

/// Euclidean distance on the torus.
pub fn periodic_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| wrap_angle(x - y).abs().min(TWO_PI - wrap_angle(x - y).abs()).powi(2))
        .sum::<f64>()
        .sqrt()
}

fn cmp_k(a: &[f64], b: &[f64]) -> Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(Ordering::Equal)
}

fn detector(model: &ModelSpec, k: &[f64]) -> Result<C64> {
    let h = model.bloch(k)?;
    Ok(char_poly_coeffs(&h)[model.generic_nullity()])
}

fn coeff_scale(h: &ComplexMatrix, g: usize) -> Result<f64> {
    Ok((1.0 + spectral_norm(h)?).powi((h.n() - g) as i32))
}

fn offset(k: &[f64], dir: &[f64], t: f64) -> Vec<f64> {
    k.iter().zip(dir).map(|(x, d)| x + t * d).collect()
}

fn unit(d: usize, i: usize) -> Vec<f64> {
    let mut e = vec![0.0; d];
    e[i] = 1.0;
    e
}

/// Solves `(JᵀJ + μI)δ = −Jᵀr` for a real Jacobian with `d` columns.
fn damped_step(jac: &[Vec<f64>], res: &[f64]) -> Option<Vec<f64>> {
    let d = jac.first()?.len();
    let mut jtj = Mat::<f64>::zeros(d, d);
    let mut rhs = Mat::<f64>::zeros(d, 1);
    for (row, &r) in jac.iter().zip(res) {
        for a in 0..d {
            rhs[(a, 0)] -= row[a] * r;
            for b in 0..d {
                jtj[(a, b)] += row[a] * row[b];
            }
        }
    }
    let tr: f64 = (0..d).map(|a| jtj[(a, a)]).sum();
    if !(tr > 0.0 && tr.is_finite()) {
        return None;
    }
    for a in 0..d {
        jtj[(a, a)] += 1e-12 * tr;
    }
    let inv = jtj.partial_piv_lu().inverse();
    let step = &inv * &rhs;
    let out: Vec<f64> = (0..d).map(|a| step[(a, 0)]).collect();
    out.iter().all(|x| x.is_finite()).then_some(out)
}

/// Backtracking line search; returns the accepted point and its merit.
fn line_search(
    k: &[f64],
    step: &[f64],
    current: f64,
    merit: impl Fn(&[f64]) -> Result<f64>,
) -> Result<Option<(Vec<f64>, f64)>> {
    let mut t = 1.0;
    for _ in 0..40 {
        let trial = offset(k, step, t);
        let m = merit(&trial)?;
        if m < current {
            return Ok(Some((trial, m)));
        }
        t *= 0.5;
    }
    Ok(None)
}

/// Gauss-Newton on the complex detector `c_g(k)`.
fn newton_on_detector(model: &ModelSpec, k0: &[f64]) -> Result<(Vec<f64>, usize)> {
    let d = k0.len();
    let g = model.generic_nullity();
    let mut k = k0.to_vec();
    let mut iterations = 0;
    while iterations < MAX_ITER {
        let h = model.bloch(&k)?;
        let r = char_poly_coeffs(&h)[g];
        if r.norm() <= ACCEPT_REL * coeff_scale(&h, g)? {
            break;
        }
        iterations += 1;
        let mut cols = Vec::with_capacity(d);
        for i in 0..d {
            let e = unit(d, i);
            let plus = detector(model, &offset(&k, &e, FD_STEP))?;
            let minus = detector(model, &offset(&k, &e, -FD_STEP))?;
            cols.push((plus - minus) / (2.0 * FD_STEP));
        }
        let jac = vec![
            cols.iter().map(|z| z.re).collect::<Vec<_>>(),
            cols.iter().map(|z| z.im).collect::<Vec<_>>(),
        ];
        let Some(step) = damped_step(&jac, &[r.re, r.im]) else { break };
        let merit = |p: &[f64]| detector(model, p).map(|c| c.norm());
        match line_search(&k, &step, r.norm(), merit)? {
            Some((next, _)) => {
                let moved = next.iter().zip(&k).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
                k = next;
                if moved < 1e-15 {
                    break;
                }
            }
            None => break,
        }
    }
    Ok((k, iterations))
}

fn small_sigma_norm(model: &ModelSpec, k: &[f64], m: usize) -> Result<f64> {
    let (sv, _, _) = svd(&model.bloch(k)?)?;
    Ok(sv[sv.len() - m..].iter().map(|s| s * s).sum::<f64>().sqrt())
}

/// Gauss-Newton on the projection of `H(k)` onto its `m` smallest singular
/// directions. Multiple roots of `c_g` converge only linearly under the
/// first stage; this restores fast convergence there.
fn polish(model: &ModelSpec, k0: &[f64], m: usize) -> Result<(Vec<f64>, usize)> {
    let d = k0.len();
    let mut k = k0.to_vec();
    let mut iterations = 0;
    while iterations < MAX_ITER {
        let h = model.bloch(&k)?;
        let (sv, u, v) = svd(&h)?;
        let n = h.n();
        let current = sv[n - m..].iter().map(|s| s * s).sum::<f64>().sqrt();
        if current <= 1e-15 * (1.0 + sv[0]) {
            break;
        }
        iterations += 1;
        let project = |p: &[f64]| -> Result<Vec<C64>> {
            let hp = model.bloch(p)?;
            let mut out = Vec::with_capacity(m * m);
            for a in n - m..n {
                let ua: Vec<C64> = (0..n).map(|i| u[(i, a)].conj()).collect();
                for b in n - m..n {
                    let vb: Vec<C64> = (0..n).map(|i| v[(i, b)]).collect();
                    let hv = hp.apply(&vb);
                    out.push(ua.iter().zip(&hv).map(|(x, y)| x * y).sum());
                }
            }
            Ok(out)
        };
        let r = project(&k)?;
        let mut jac = vec![vec![0.0; d]; 2 * r.len()];
        for i in 0..d {
            let e = unit(d, i);
            let plus = project(&offset(&k, &e, FD_STEP))?;
            let minus = project(&offset(&k, &e, -FD_STEP))?;
            for (row, (p, q)) in plus.iter().zip(&minus).enumerate() {
                let der = (p - q) / (2.0 * FD_STEP);
                jac[2 * row][i] = der.re;
                jac[2 * row + 1][i] = der.im;
            }
        }
        let res: Vec<f64> = r.iter().flat_map(|z| [z.re, z.im]).collect();
        let Some(step) = damped_step(&jac, &res) else { break };
        match line_search(&k, &step, current, |p| small_sigma_norm(model, p, m))? {
            Some((next, _)) => k = next,
            None => break,
        }
    }
    Ok((k, iterations))
}

/// Refines a zero-energy degeneracy starting from `k0`.
///
/// Stage one drives `c_g(k)` to zero by damped Gauss-Newton. If more
/// singular values than the generic nullity are small at the result, stage
/// two polishes on the projected small block. The result counts as refined
/// when `|c_g| ≤ 1e-10·(1+‖H‖₂)^{N−g}`; non-convergence is reported through
/// `refined = false`, never as an error.
pub fn refine_degeneracy(model: &ModelSpec, k0: &[f64], policy: &TolerancePolicy) -> Result<DegeneracyCandidate> {
    policy.validate()?;
    let g = model.generic_nullity();
    let (k1, it1) = newton_on_detector(model, &canonical_k(k0))?;
    let h1 = model.bloch(&k1)?;
    let (sv, _, _) = svd(&h1)?;
    let small = sv.iter().filter(|&&s| s <= SMALL_SIGMA_REL * (1.0 + sv[0])).count();
    let mut k = k1.clone();
    let mut iterations = it1;
    if small > g {
        let (k2, it2) = polish(model, &k1, small)?;
        iterations += it2;
        let r1 = detector(model, &k1)?.norm();
        let r2 = detector(model, &k2)?.norm();
        let floor = ACCEPT_REL * coeff_scale(&h1, g)?;
        if r2 <= r1.max(floor) {
            k = k2;
        }
    }
    let k = canonical_k(&k);
    let h = model.bloch(&k)?;
    let residual = char_poly_coeffs(&h)[g].norm();
    let refined = residual <= REFINED_REL * coeff_scale(&h, g)?;
    let mut abs_e: Vec<f64> = crate::matkit::eigenvalues(&h)?.iter().map(|e| e.norm()).collect();
    abs_e.sort_by(f64::total_cmp);
    Ok(DegeneracyCandidate {
        k,
        min_abs_energy: abs_e[g.min(abs_e.len() - 1)],
        residual,
        refined,
        iterations,
        off_catalog: None,
        report: None,
        classification_error: None,
    })
}

/// Classifies `E = 0` at the candidate momentum and stores the outcome.
pub fn classify_candidate(model: &ModelSpec, cand: &mut DegeneracyCandidate, policy: &TolerancePolicy) {
    let outcome = model
        .bloch(&cand.k)
        .and_then(|h| classify_point(&h, C64::new(0.0, 0.0), policy));
    match outcome {
        Ok(r) => cand.report = Some(r.with_k(&cand.k)),
        Err(e) => cand.classification_error = Some(e.to_string()),
    }
}

/// Grid search for zero-energy degeneracies.
///
/// Grid points where `|c_g|` is no larger than at any neighbor are refined;
/// refined candidates with `min_abs_energy ≤ 10·cluster radius` are kept,
/// deduplicated within one cell diagonal, sorted by `k`, and classified.
/// For catalog models each candidate is also marked on or off the catalog.
pub fn bz_scan(model: &ModelSpec, grid: &ScanGrid, policy: &TolerancePolicy) -> Result<Vec<DegeneracyCandidate>> {
    policy.validate()?;
    grid.validate()?;
    if grid.dims != model.k_dims() {
        return Err(Error::InvalidInput(format!(
            "{} needs a {}D grid, got {}D",
            model.id(),
            model.k_dims(),
            grid.dims
        )));
    }
    let values: Vec<f64> = (0..grid.len())
        .into_par_iter()
        .map(|i| detector(model, &grid.point(i)).map(|c| c.norm()))
        .collect::<Result<_>>()?;

    let periodic = grid.periodic();
    let res = grid.resolution as isize;
    let offsets: Vec<Vec<isize>> = (0..3usize.pow(grid.dims as u32))
        .map(|mut c| {
            (0..grid.dims)
                .map(|_| {
                    let o = (c % 3) as isize - 1;
                    c /= 3;
                    o
                })
                .collect::<Vec<_>>()
        })
        .filter(|o| o.iter().any(|&x| x != 0))
        .collect();
    let minima: Vec<usize> = (0..grid.len())
        .filter(|&i| {
            let idx = grid.index(i);
            offsets.iter().all(|o| {
                let mut nb = Vec::with_capacity(grid.dims);
                for (d, &di) in o.iter().enumerate() {
                    let j = idx[d] as isize + di;
                    let j = if periodic {
                        j.rem_euclid(res)
                    } else if j < 0 || j >= res {
                        return true;
                    } else {
                        j
                    };
                    nb.push(j as usize);
                }
                values[i] <= values[grid.flat(&nb)]
            })
        })
        .collect();

    let refined: Vec<DegeneracyCandidate> = minima
        .par_iter()
        .map(|&i| refine_degeneracy(model, &grid.point(i), policy))
        .collect::<Result<_>>()?;

    let mut kept: Vec<DegeneracyCandidate> = Vec::new();
    for c in refined {
        let h = model.bloch(&c.k)?;
        let radius = policy.cluster_radius(spectral_norm(&h)?);
        if !(c.refined && c.min_abs_energy <= 10.0 * radius) {
            continue;
        }
        let diag = grid.cell_diagonal();
        match kept.iter_mut().find(|o| periodic_distance(&o.k, &c.k) <= diag) {
            Some(o) if c.residual < o.residual => *o = c,
            Some(_) => {}
            None => kept.push(c),
        }
    }
    kept.sort_by(|a, b| cmp_k(&a.k, &b.k));

    let catalog = analytic_degeneracies(model).ok();
    kept.par_iter_mut().for_each(|c| {
        classify_candidate(model, c, policy);
        if let Some(cat) = &catalog {
            let on = cat.iter().any(|a| periodic_distance(&a.k, &c.k) <= 1e-6) || on_reciprocal_ring(model, &c.k);
            c.off_catalog = Some(!on);
        }
    });
    Ok(kept)
}

fn on_reciprocal_ring(model: &ModelSpec, k: &[f64]) -> bool {
    match model {
        ModelSpec::Lieb(LiebSpec::Reciprocal { phi, psi }) if wrap_angle(phi - psi).abs() <= 1e-12 => {
            (k[0].cos() + k[1].cos() - 2.0 * phi.cos()).abs() <= 1e-6
        }
        _ => false,
    }
}

/// A closed-form degeneracy location with its expected fingerprint.
#[derive(Clone, Debug, PartialEq)]
pub struct AnalyticDegeneracy {
    pub k: Vec<f64>,
    pub alpha: usize,
    pub gamma: usize,
    pub partials: Vec<usize>,
    pub label: Label,
}

impl AnalyticDegeneracy {
    fn new(k: Vec<f64>, partials: &[usize]) -> Self {
        let beta = PartialMultiplicityFunction::from_partials(partials).expect("catalog partials are positive");
        Self {
            k: canonical_k(&k),
            alpha: beta.alpha(),
            gamma: beta.gamma(),
            partials: beta.partials(),
            label: Label::from_multiplicities(beta.alpha(), beta.gamma()),
        }
    }
}

fn finish(mut v: Vec<AnalyticDegeneracy>) -> Vec<AnalyticDegeneracy> {
    v.sort_by(|a, b| cmp_k(&a.k, &b.k));
    v.dedup_by(|a, b| periodic_distance(&a.k, &b.k) <= 1e-12);
    v
}

fn near_multiple_of_pi(x: f64) -> bool {
    let w = wrap_angle(x).abs();
    w <= 1e-12 || (PI - w) <= 1e-12
}

/// Known zero-energy degeneracies of the catalog models.
///
/// For the reciprocal Lieb model with `Φ = Ψ` the degeneracies form the
/// ring `cos kx + cos ky = 2cos Φ`; only its two FEPs are listed here and
/// [`trace_ring`] samples the rest. HODSM entries cover the `kx = ky = 0`
/// line, and the non-Hermitian variants need `s = −t = 1`.
pub fn analytic_degeneracies(model: &ModelSpec) -> Result<Vec<AnalyticDegeneracy>> {
    let mut out = Vec::new();
    match model {
        ModelSpec::Lieb(spec) => match *spec {
            LiebSpec::Hermitian => out.push(AnalyticDegeneracy::new(vec![PI, PI], &[1, 1, 1])),
            LiebSpec::NhSymmetric { epsilon } => {
                if epsilon == 0.0 {
                    return analytic_degeneracies(&ModelSpec::Lieb(LiebSpec::Hermitian));
                }
                let c = epsilon * epsilon / 2.0 - 1.0;
                if c <= 1.0 {
                    let k0 = c.acos();
                    for (a, b) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
                        out.push(AnalyticDegeneracy::new(vec![a * k0, b * k0], &[3]));
                    }
                }
            }
            LiebSpec::MinimalFep { epsilon } => {
                if epsilon == 0.0 {
                    return analytic_degeneracies(&ModelSpec::Lieb(LiebSpec::Hermitian));
                }
                out.push(AnalyticDegeneracy::new(vec![PI, PI], &[2, 1]));
                let a = two_arccot(epsilon / 2.0);
                out.push(AnalyticDegeneracy::new(vec![a, -a], &[3]));
            }
            LiebSpec::Reciprocal { phi, psi } => {
                if near_multiple_of_pi(phi) || near_multiple_of_pi(psi) {
                    return Err(Error::Unsupported(
                        "reciprocal catalog needs phi and psi away from multiples of pi".into(),
                    ));
                }
                let same = wrap_angle(phi - psi).abs() <= 1e-12;
                if !same && near_multiple_of_pi(phi - psi) {
                    return Err(Error::Unsupported("reciprocal catalog needs phi - psi = 0 or away from multiples of pi".into()));
                }
                out.push(AnalyticDegeneracy::new(vec![psi, phi], &[2, 1]));
                out.push(AnalyticDegeneracy::new(vec![-psi, -phi], &[2, 1]));
                if !same {
                    out.push(AnalyticDegeneracy::new(vec![psi, -phi], &[3]));
                    out.push(AnalyticDegeneracy::new(vec![-psi, phi], &[3]));
                }
            }
            LiebSpec::General(_) => {
                return Err(Error::Unsupported("no closed-form catalog for lieb:general".into()))
            }
        },
        ModelSpec::Hodsm(spec) => out = hodsm_catalog(spec)?,
    }
    Ok(finish(out))
}

fn hodsm_catalog(spec: &HodsmSpec) -> Result<Vec<AnalyticDegeneracy>> {
    spec.validate()?;
    let mut out = Vec::new();
    let both = |out: &mut Vec<AnalyticDegeneracy>, kx: f64, c: f64, partials: &[usize]| {
        if c.abs() <= 1.0 {
            let kz = c.acos();
            out.push(AnalyticDegeneracy::new(vec![kx, kx, kz], partials));
            out.push(AnalyticDegeneracy::new(vec![kx, kx, -kz], partials));
        }
    };
    if spec.variant == 0 {
        let r = spec.t / spec.s;
        both(&mut out, 0.0, -2.0 - 2.0 * r, &[1, 1, 1, 1]);
        both(&mut out, PI, 2.0 - 2.0 * r, &[1, 1, 1, 1]);
        return Ok(out);
    }
    if (spec.t + 1.0).abs() > 1e-12 || (spec.s - 1.0).abs() > 1e-12 {
        return Err(Error::Unsupported(
            "non-Hermitian HODSM catalog is available only for s = -t = 1".into(),
        ));
    }
    let e = spec.epsilon;
    if e == 0.0 {
        return hodsm_catalog(&HodsmSpec { variant: 0, ..*spec });
    }
    match spec.variant {
        1 => {
            both(&mut out, 0.0, 0.0, &[1, 1]);
            both(&mut out, 0.0, e.abs(), &[4]);
            both(&mut out, 0.0, -e.abs(), &[4]);
        }
        2 => {
            both(&mut out, 0.0, 0.0, &[3, 1]);
            both(&mut out, 0.0, -e, &[3, 1]);
        }
        3 => {
            both(&mut out, 0.0, 0.0, &[2, 2]);
            both(&mut out, 0.0, 2f64.sqrt() * e, &[2]);
            both(&mut out, 0.0, -(2f64.sqrt()) * e, &[2]);
        }
        4 => {
            both(&mut out, 0.0, 0.0, &[2, 1, 1]);
            both(&mut out, 0.0, -2.0 * e, &[2]);
        }
        v => return Err(Error::InvalidInput(format!("unknown variant {v}"))),
    }
    Ok(out)
}

/// One classified point on an exceptional ring or line.
#[derive(Clone, Debug, PartialEq)]
pub struct ManifoldSample {
    pub k: Vec<f64>,
    pub case: LiebCaseReport,
    pub report: Option<DegeneracyReport>,
    pub error: Option<String>,
}

/// Samples and classifies the degeneracy manifold `cos kx + cos ky = 2cos Φ`
/// of the reciprocal Lieb model with `Φ = Ψ`.
///
/// `kx` runs over a symmetric ladder `±(i+½)h` that contains `±Φ` exactly,
/// and each rung contributes both branches `ky = ±arccos(2cos Φ − cos kx)`,
/// so `samples` must be even. For `Φ ≡ π/2 (mod π)` the ring is the square
/// `|kx| + |ky| = π`, made of four straight lines. For `cos Φ < 0` the ring
/// is centered on `(π, π)` and is obtained from the `π − Φ` ring by that
/// shift.
pub fn trace_ring(spec: &LiebSpec, samples: usize, policy: &TolerancePolicy) -> Result<Vec<ManifoldSample>> {
    policy.validate()?;
    let LiebSpec::Reciprocal { phi, psi } = *spec else {
        return Err(Error::InvalidInput("trace_ring needs the reciprocal Lieb model".into()));
    };
    if wrap_angle(phi - psi).abs() > 1e-12 {
        return Err(Error::InvalidInput("trace_ring needs phi = psi".into()));
    }
    if samples < 4 || samples % 2 != 0 {
        return Err(Error::InvalidInput(format!("samples must be even and at least 4, got {samples}")));
    }
    let (base, shift) = if phi.cos() < 0.0 { (PI - phi, PI) } else { (phi, 0.0) };
    let a = wrap_angle(base).abs();
    let rhs = 2.0 * a.cos();
    if !(rhs - 1.0).abs().le(&1.0) {
        return Err(Error::InvalidInput("empty ring".into()));
    }
    let kmax = (rhs - 1.0).acos();
    if a <= 1e-12 {
        return Err(Error::InvalidInput("ring degenerates to a point for phi = 0".into()));
    }
    let rungs = samples / 2;
    let half = rungs / 2;
    // Smallest anchor index with the outermost rung strictly inside kmax.
    let outer = (rungs as f64 - 1.0) / 2.0;
    let mut anchor = 0usize;
    while a / (anchor as f64 + 0.5) * outer >= kmax {
        anchor += 1;
        if anchor >= 64 * rungs {
            return Err(Error::InvalidInput("ring too small to sample".into()));
        }
    }
    let h = a / (anchor as f64 + 0.5);
    let mut kxs: Vec<f64> = (0..half).flat_map(|i| [-(i as f64 + 0.5) * h, (i as f64 + 0.5) * h]).collect();
    if rungs % 2 == 1 {
        kxs.push(0.0);
    }
    kxs.sort_by(f64::total_cmp);
    // Exact anchors so the FEPs fall on the ladder.
    for x in kxs.iter_mut() {
        if (x.abs() - a).abs() <= 1e-12 {
            *x = a.copysign(*x);
        }
    }

    let mut points = Vec::with_capacity(samples);
    for &kx in &kxs {
        let ky = (rhs - kx.cos()).clamp(-1.0, 1.0).acos();
        for branch in [1.0, -1.0] {
            points.push(canonical_k(&[kx + shift, branch * ky + shift]));
        }
    }
    Ok(points
        .into_par_iter()
        .map(|k| {
            let pqrs = spec.pqrs([k[0], k[1]]);
            let (case, outcome) = match pqrs {
                Ok([p, q, r, s]) => (
                    lieb_case(p, q, r, s, policy),
                    lieb_bloch_classify(spec, &k, policy),
                ),
                Err(e) => return Err(e),
            };
            let (report, error) = match outcome {
                Ok(r) => (Some(r), None),
                Err(e) => (None, Some(e.to_string())),
            };
            Ok(ManifoldSample { k, case, report, error })
        })
        .collect::<Result<Vec<_>>>()?)
}

fn lieb_bloch_classify(spec: &LiebSpec, k: &[f64], policy: &TolerancePolicy) -> Result<DegeneracyReport> {
    let h = crate::models::lieb_bloch(spec, [k[0], k[1]])?;
    Ok(classify_point(&h, C64::new(0.0, 0.0), policy)?.with_k(k))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::LiebCase;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn lieb(spec: LiebSpec) -> ModelSpec {
        ModelSpec::Lieb(spec)
    }

    #[test]
    fn angle_wrapping() {
        assert_eq!(wrap_angle(-PI), PI);
        assert!((wrap_angle(3.0 * PI / 2.0) + PI / 2.0).abs() < 1e-15);
        assert!(periodic_distance(&[PI - 1e-3, 0.0], &[-PI + 1e-3, 0.0]) < 2.1e-3);
    }

    #[test]
    fn grid_indexing_round_trips() {
        let g = ScanGrid::new(3, 8).unwrap();
        for i in [0, 7, 100, 511] {
            assert_eq!(g.flat(&g.index(i)), i);
        }
        assert_eq!(g.point(0), vec![-PI; 3]);
        assert!(ScanGrid::new(2, 4).is_err());
        assert!(ScanGrid::new(4, 16).is_err());
    }

    #[test]
    fn refine_minimal_fep_from_offset() {
        let m = lieb(LiebSpec::MinimalFep { epsilon: 1.0 });
        let c = refine_degeneracy(&m, &[PI + 0.05, PI - 0.05], &TolerancePolicy::default()).unwrap();
        assert!(c.refined);
        assert!(periodic_distance(&c.k, &[PI, PI]) < 1e-8, "{:?}", c.k);
    }

    #[test]
    fn refine_nh1_ep4_from_offset() {
        let m = ModelSpec::Hodsm(HodsmSpec::standard(1, FRAC_1_SQRT_2));
        let c = refine_degeneracy(&m, &[0.0, 0.0, 0.8], &TolerancePolicy::default()).unwrap();
        assert!(c.refined);
        assert!(periodic_distance(&c.k, &[0.0, 0.0, PI / 4.0]) < 1e-6, "{:?}", c.k);
    }

    #[test]
    fn refine_at_exact_point_returns_immediately() {
        let m = lieb(LiebSpec::Hermitian);
        let c = refine_degeneracy(&m, &[PI, PI], &TolerancePolicy::default()).unwrap();
        assert!(c.refined);
        assert_eq!(c.iterations, 0);
        assert_eq!(c.k, vec![PI, PI]);
    }

    #[test]
    fn catalogs() {
        let m = lieb(LiebSpec::Reciprocal {
            phi: PI / 2.0,
            psi: 3.0 * PI / 4.0,
        });
        let cat = analytic_degeneracies(&m).unwrap();
        assert_eq!(cat.len(), 4);
        let fep = cat.iter().filter(|a| a.label == Label::Fragmented).count();
        assert_eq!(fep, 2);
        let h = analytic_degeneracies(&ModelSpec::Hodsm(HodsmSpec::standard(0, 0.0))).unwrap();
        assert_eq!(h.len(), 2);
        assert!(h.iter().all(|a| a.k[0] == 0.0 && (a.k[2].abs() - PI / 2.0).abs() < 1e-15));
        let nh3 = analytic_degeneracies(&ModelSpec::Hodsm(HodsmSpec::standard(3, 0.5))).unwrap();
        assert_eq!(nh3.len(), 6);
        assert!(analytic_degeneracies(&lieb(LiebSpec::intracell(
            C64::new(1.0, 0.0),
            C64::new(1.0, 0.0),
            C64::new(1.0, 0.0),
            C64::new(1.0, 0.0)
        )))
        .is_err());
    }

    #[test]
    fn ring_sample_at_fep_is_case_two() {
        let spec = LiebSpec::Reciprocal {
            phi: PI / 4.0,
            psi: PI / 4.0,
        };
        let ring = trace_ring(&spec, 64, &TolerancePolicy::default()).unwrap();
        let fep = ring
            .iter()
            .find(|s| periodic_distance(&s.k, &[PI / 4.0, PI / 4.0]) < 1e-12)
            .expect("ladder contains the FEP");
        assert_eq!(fep.case.case, LiebCase::Case2);
        assert_eq!(fep.report.as_ref().unwrap().label, Label::Fragmented);
    }

    #[test]
    fn ring_rejects_unequal_angles() {
        let spec = LiebSpec::Reciprocal { phi: 0.3, psi: 0.4 };
        assert!(trace_ring(&spec, 64, &TolerancePolicy::default()).is_err());
    }
}
