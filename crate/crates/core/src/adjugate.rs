//! Faddeev-LeVerrier modes of the adjugate of `λ − A`, with `A = H − Ω`.
//!
//! `adj(λ − A) = Σ λ^k B_k` and `det(λ − A) = Σ λ^k c_k`, so the resolvent
//! is a ratio of two polynomials in `λ = E − Ω` whose low-order coefficients
//! encode the degeneracy structure at `Ω`.

use crate::error::{Error, Result};
use crate::matkit::{rank_above, singular_values, spectral_norm, ComplexMatrix, TolerancePolicy, C64};

/// Largest dimension accepted by [`flv_modes`] without forcing.
pub const FLV_MAX_DIM: usize = 64;

#[derive(Clone, Debug)]
pub struct ModeSequence {
    shift: C64,
    shifted: ComplexMatrix,
    modes: Vec<ComplexMatrix>,
    coeffs: Vec<C64>,
    source_norm: f64,
}

/// Computes `B_0..B_{N−1}` and `c_0..c_N` at `shift`. Refuses `N > 64`.
pub fn flv_modes(h: &ComplexMatrix, shift: C64) -> Result<ModeSequence> {
    if h.n() > FLV_MAX_DIM {
        return Err(Error::TooLarge {
            n: h.n(),
            cap: FLV_MAX_DIM,
        });
    }
    flv_modes_forced(h, shift)
}

/// As [`flv_modes`] without the dimension guard. Accuracy degrades like
/// `‖A‖^N`.
pub fn flv_modes_forced(h: &ComplexMatrix, shift: C64) -> Result<ModeSequence> {
    if !(shift.re.is_finite() && shift.im.is_finite()) {
        return Err(Error::NonFinite);
    }
    let n = h.n();
    let a = h.shifted(shift);
    let mut modes = vec![ComplexMatrix::identity(n); n];
    let mut coeffs = vec![C64::new(0.0, 0.0); n + 1];
    coeffs[n] = C64::new(1.0, 0.0);
    for k in (0..n).rev() {
        let ab = a.matmul(&modes[k]);
        let ck = -ab.trace() / (n - k) as f64;
        coeffs[k] = ck;
        if k > 0 {
            modes[k - 1] = ab.shifted(-ck);
        }
    }
    let source_norm = spectral_norm(&a)?;
    Ok(ModeSequence {
        shift,
        shifted: a,
        modes,
        coeffs,
        source_norm,
    })
}

impl ModeSequence {
    pub fn dim(&self) -> usize {
        self.modes.len()
    }

    pub fn shift(&self) -> C64 {
        self.shift
    }

    /// `A = H − Ω·I`.
    pub fn shifted_matrix(&self) -> &ComplexMatrix {
        &self.shifted
    }

    pub fn modes(&self) -> &[ComplexMatrix] {
        &self.modes
    }

    pub fn mode(&self, k: usize) -> &ComplexMatrix {
        &self.modes[k]
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    /// `‖A‖₂`.
    pub fn source_norm(&self) -> f64 {
        self.source_norm
    }

    /// `C_k = tr(A·B_k) = −(N−k)·c_k`.
    pub fn trace_condition(&self, k: usize) -> C64 {
        -self.coeffs[k] * (self.dim() - k) as f64
    }

    /// `q(λ) = Σ λ^k c_k`, which equals `det(λ − A)`.
    pub fn char_poly(&self, lambda: C64) -> C64 {
        self.coeffs
            .iter()
            .rev()
            .fold(C64::new(0.0, 0.0), |acc, &c| acc * lambda + c)
    }

    /// Scale below which `B_k` counts as zero: `ck_rel·(1+‖A‖₂)^{N−1−k}`.
    pub fn mode_threshold(&self, k: usize, policy: &TolerancePolicy) -> f64 {
        policy.ck_rel * (1.0 + self.source_norm).powi((self.dim() - 1 - k) as i32)
    }

    /// Scale below which `C_k` counts as zero: `ck_rel·(1+‖A‖₂)^{N−k}`.
    pub fn trace_threshold(&self, k: usize, policy: &TolerancePolicy) -> f64 {
        policy.ck_rel * (1.0 + self.source_norm).powi((self.dim() - k) as i32)
    }

    pub fn mode_vanishes(&self, k: usize, policy: &TolerancePolicy) -> bool {
        self.modes[k].max_abs() <= self.mode_threshold(k, policy)
    }

    /// Numerical rank of `B_k`, with `rank(B_k) = 0` for negative `k`.
    pub fn mode_rank(&self, k: isize, policy: &TolerancePolicy) -> Result<usize> {
        if k < 0 {
            return Ok(0);
        }
        let k = k as usize;
        if self.mode_vanishes(k, policy) {
            return Ok(0);
        }
        let b = &self.modes[k];
        let sv = singular_values(b)?;
        let smax = sv.first().copied().unwrap_or(0.0);
        let cutoff = policy
            .rank_cutoff(smax, b.frobenius_norm())
            .max(self.mode_threshold(k, policy));
        Ok(rank_above(&sv, cutoff))
    }
}

/// Coefficients `c_0..c_N` of `det(λ − H)` by the same recursion, without
/// storing the modes.
pub fn char_poly_coeffs(h: &ComplexMatrix) -> Vec<C64> {
    let n = h.n();
    let mut coeffs = vec![C64::new(0.0, 0.0); n + 1];
    coeffs[n] = C64::new(1.0, 0.0);
    let mut b = ComplexMatrix::identity(n);
    for k in (0..n).rev() {
        let ab = h.matmul(&b);
        coeffs[k] = -ab.trace() / (n - k) as f64;
        if k > 0 {
            b = ab.shifted(-coeffs[k]);
        }
    }
    coeffs
}

/// Resolvent `(E − H)^{-1}` assembled from the modes.
pub fn greens_modal(modes: &ModeSequence, energy: C64) -> Result<ComplexMatrix> {
    let lambda = energy - modes.shift;
    let n = modes.dim();
    let q = modes.char_poly(lambda);
    let floor = 1e-12 * (1.0 + lambda.norm()).powi(n as i32);
    if !(q.norm() > floor) {
        return Err(Error::AtResonance {
            energy,
            denominator: q.norm(),
        });
    }
    let mut num = modes.modes[n - 1].clone();
    for k in (0..n - 1).rev() {
        num = &num.scale(lambda) + &modes.modes[k];
    }
    Ok(num.scale(q.inv()))
}

/// Amplitudes of the leading resolvent divergence at a degeneracy.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ResponseStrengths {
    /// Trace-norm strength.
    pub eta: f64,
    /// Spectral-norm strength.
    pub xi: f64,
    pub ell: usize,
}

/// `η = ‖B_{α−ℓ}‖_F / |c_α|` and `ξ = ‖B_{α−ℓ}‖₂ / |c_α|`.
pub fn response_strengths(
    modes: &ModeSequence,
    alpha: usize,
    ell: usize,
    policy: &TolerancePolicy,
) -> Result<ResponseStrengths> {
    let n = modes.dim();
    if !(1 <= ell && ell <= alpha && alpha <= n) {
        return Err(Error::InvalidInput(format!(
            "need 1 <= ell <= alpha <= N, got ell={ell}, alpha={alpha}, N={n}"
        )));
    }
    let c = modes.coeffs[alpha];
    if alpha < n && c.norm() <= modes.trace_threshold(alpha, policy) {
        return Err(Error::InconsistentRanks(format!(
            "c_{alpha} = {c} vanishes, so alpha is larger than {alpha}"
        )));
    }
    if let Some(k) = (0..alpha - ell).find(|&k| !modes.mode_vanishes(k, policy)) {
        return Err(Error::InconsistentRanks(format!(
            "B_{k} is nonzero below alpha - ell = {}",
            alpha - ell
        )));
    }
    let b = &modes.modes[alpha - ell];
    let eta = b.frobenius_norm() / c.norm();
    let xi = spectral_norm(b)? / c.norm();
    Ok(ResponseStrengths { eta, xi, ell })
}
