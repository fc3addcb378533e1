//! Power laws of the resolvent and of perturbative splitting near a
//! degeneracy: `tr(G†G) ~ |E − Ei|^{−2ℓ}` and `δE ~ ε^{1/ℓ}`.

use std::f64::consts::FRAC_PI_4;

use faer::linalg::solvers::DenseSolveCore;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::matkit::{eigenvalues, spectral_norm, ComplexMatrix, TolerancePolicy, C64};
use crate::testgen::unit_direction;

/// Least-squares line through `(log x, log y)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExponentFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    /// Range of the swept scale.
    pub window: (f64, f64),
    /// `−2ℓ` for lineshapes, `1/ℓ` for splittings.
    pub expected_slope: f64,
    /// Splitting only: slope of the mean over directions.
    pub mean_slope: Option<f64>,
}

impl ExponentFit {
    /// `|slope − expected| ≤ rel·|expected|`.
    pub fn within(&self, rel: f64) -> bool {
        (self.slope - self.expected_slope).abs() <= rel * self.expected_slope.abs()
    }
}

/// Ordinary least squares; returns slope, intercept and R².
pub fn fit_line(x: &[f64], y: &[f64]) -> Result<(f64, f64, f64)> {
    let n = x.len();
    if n < 2 || y.len() != n {
        return Err(Error::InvalidInput("need at least two paired points to fit".into()));
    }
    let mx = x.iter().sum::<f64>() / n as f64;
    let my = y.iter().sum::<f64>() / n as f64;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    if !(sxx > 0.0) {
        return Err(Error::InvalidInput("degenerate abscissa".into()));
    }
    let slope = sxy / sxx;
    let r2 = if syy > 0.0 { (sxy * sxy / (sxx * syy)).clamp(0.0, 1.0) } else { 1.0 };
    Ok((slope, my - slope * mx, r2))
}

fn log_ladder(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

fn check_window(window: (f64, f64), points: usize) -> Result<()> {
    if !(window.0 > 0.0 && window.0 < window.1 && window.1.is_finite()) || points < 3 {
        return Err(Error::InvalidInput(format!(
            "window must satisfy 0 < min < max with at least 3 points, got {window:?} and {points}"
        )));
    }
    Ok(())
}

/// Eigenvalues of `h` outside the cluster around `ei`, and the cluster size.
fn split_spectrum(h: &ComplexMatrix, ei: C64, policy: &TolerancePolicy) -> Result<(Vec<C64>, usize)> {
    let radius = policy.cluster_radius(spectral_norm(h)?);
    let ev = eigenvalues(h)?;
    let inside = ev.iter().filter(|e| (**e - ei).norm() <= radius).count();
    let others = ev.into_iter().filter(|e| (*e - ei).norm() > radius).collect();
    Ok((others, inside))
}

fn nearest(others: &[C64], ei: C64) -> Option<C64> {
    others
        .iter()
        .copied()
        .min_by(|a, b| (*a - ei).norm().total_cmp(&(*b - ei).norm()))
}

/// Fits `log tr(G†G)` against `log |E − Ei|` along a ray from `Ei`.
///
/// The ray leaves `Ei` at 45° from the direction of the nearest other
/// eigenvalue. The window must stay ten times closer to `Ei` than that
/// eigenvalue.
pub fn lineshape_exponent(
    h: &ComplexMatrix,
    ei: C64,
    ell: usize,
    window: (f64, f64),
    points: usize,
    policy: &TolerancePolicy,
) -> Result<ExponentFit> {
    policy.validate()?;
    check_window(window, points)?;
    if ell == 0 {
        return Err(Error::InvalidInput("ell must be positive".into()));
    }
    let (others, _) = split_spectrum(h, ei, policy)?;
    let theta = match nearest(&others, ei) {
        Some(e) => {
            let distance = (e - ei).norm();
            if distance < 10.0 * window.1 {
                return Err(Error::WindowCollision { distance });
            }
            (e - ei).arg() + FRAC_PI_4
        }
        None => FRAC_PI_4,
    };
    let dir = C64::from_polar(1.0, theta);
    let n = h.n();
    let radii = log_ladder(window.0, window.1, points);
    let logp: Vec<f64> = radii
        .iter()
        .map(|&r| {
            let e = ei + dir * r;
            let m = faer::Mat::<C64>::from_fn(n, n, |i, j| {
                let d = if i == j { e } else { C64::new(0.0, 0.0) };
                d - h[(i, j)]
            });
            let g = m.partial_piv_lu().inverse();
            g.norm_l2().powi(2).ln()
        })
        .collect();
    if logp.iter().any(|v| !v.is_finite()) {
        return Err(Error::AtResonance {
            energy: ei,
            denominator: 0.0,
        });
    }
    let logr: Vec<f64> = radii.iter().map(|r| r.ln()).collect();
    let (slope, intercept, r_squared) = fit_line(&logr, &logp)?;
    Ok(ExponentFit {
        slope,
        intercept,
        r_squared,
        window,
        expected_slope: -2.0 * ell as f64,
        mean_slope: None,
    })
}

/// Settings for [`splitting_exponent`].
#[derive(Clone, Debug, PartialEq)]
pub struct SplittingConfig {
    pub directions: usize,
    pub ladder: Vec<f64>,
    pub seed: u64,
}

impl Default for SplittingConfig {
    fn default() -> Self {
        Self {
            directions: 16,
            ladder: log_ladder(1e-8, 1e-4, 9),
            seed: 0x5eed,
        }
    }
}

/// Fits the largest displacement of the eigenvalues clustered at `Ei`
/// under `H + εX` against `ε`, with `X` drawn from unit-Frobenius
/// complex-normal matrices. The maximum over directions is fitted; the
/// mean is reported alongside.
pub fn splitting_exponent(
    h: &ComplexMatrix,
    ei: C64,
    ell: usize,
    config: &SplittingConfig,
    policy: &TolerancePolicy,
) -> Result<ExponentFit> {
    policy.validate()?;
    if ell == 0 || config.directions == 0 || config.ladder.len() < 3 {
        return Err(Error::InvalidInput(
            "need ell >= 1, at least one direction and three ladder strengths".into(),
        ));
    }
    if config.ladder.iter().any(|&e| !(e > 0.0 && e.is_finite())) {
        return Err(Error::InvalidInput("ladder strengths must be positive".into()));
    }
    let (others, alpha) = split_spectrum(h, ei, policy)?;
    let alpha = alpha.max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let dirs: Vec<ComplexMatrix> = (0..config.directions)
        .map(|_| unit_direction(h.n(), &mut rng))
        .collect();

    let per_strength: Vec<(f64, f64)> = config
        .ladder
        .par_iter()
        .map(|&eps| {
            let mut worst = 0.0f64;
            let mut sum = 0.0;
            for x in &dirs {
                let ev = eigenvalues(&(h + &x.scale(C64::new(eps, 0.0))))?;
                let mut d: Vec<f64> = ev.iter().map(|e| (*e - ei).norm()).collect();
                d.sort_by(f64::total_cmp);
                let disp = d[alpha - 1];
                worst = worst.max(disp);
                sum += disp;
            }
            Ok((worst, sum / dirs.len() as f64))
        })
        .collect::<Result<_>>()?;

    if let Some(e) = nearest(&others, ei) {
        let top = per_strength.iter().map(|p| p.0).fold(0.0, f64::max);
        if top >= 0.5 * (e - ei).norm() {
            return Err(Error::LadderCollision(format!(
                "displacement {top:.3e} reaches half the distance {:.3e} to the next eigenvalue",
                (e - ei).norm()
            )));
        }
    }
    let loge: Vec<f64> = config.ladder.iter().map(|e| e.ln()).collect();
    let max_log: Vec<f64> = per_strength.iter().map(|p| p.0.ln()).collect();
    let mean_log: Vec<f64> = per_strength.iter().map(|p| p.1.ln()).collect();
    let (slope, intercept, r_squared) = fit_line(&loge, &max_log)?;
    let (mean_slope, _, _) = fit_line(&loge, &mean_log)?;
    let lo = config.ladder.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = config.ladder.iter().copied().fold(0.0, f64::max);
    Ok(ExponentFit {
        slope,
        intercept,
        r_squared,
        window: (lo, hi),
        expected_slope: 1.0 / ell as f64,
        mean_slope: Some(mean_slope),
    })
}
