//! Degeneracy fingerprints from adjugate-mode ranks, cross-checked by the
//! Weyr characteristic (ranks of powers of the shifted matrix).

use std::collections::BTreeMap;
use std::fmt;

use crate::adjugate::{flv_modes, response_strengths, ModeSequence, FLV_MAX_DIM};
use crate::error::{Error, Result};
use crate::matkit::{
    rank_above, singular_values, spectral_norm, ComplexMatrix, TolerancePolicy, C64,
};

/// Number of Jordan blocks of each size at one eigenvalue.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PartialMultiplicityFunction {
    beta: BTreeMap<usize, usize>,
}

impl PartialMultiplicityFunction {
    /// Builds from a map, dropping zero counts. Block size 0 is rejected.
    pub fn from_map(beta: BTreeMap<usize, usize>) -> Result<Self> {
        if beta.contains_key(&0) {
            return Err(Error::InvalidInput("block size 0 in beta".into()));
        }
        Ok(Self {
            beta: beta.into_iter().filter(|&(_, c)| c > 0).collect(),
        })
    }

    pub fn from_partials(partials: &[usize]) -> Result<Self> {
        let mut beta = BTreeMap::new();
        for &l in partials {
            *beta.entry(l).or_insert(0) += 1;
        }
        Self::from_map(beta)
    }

    pub fn beta(&self) -> &BTreeMap<usize, usize> {
        &self.beta
    }

    pub fn count(&self, l: usize) -> usize {
        self.beta.get(&l).copied().unwrap_or(0)
    }

    /// `Σ l·β(l)`.
    pub fn alpha(&self) -> usize {
        self.beta.iter().map(|(l, c)| l * c).sum()
    }

    /// `Σ β(l)`.
    pub fn gamma(&self) -> usize {
        self.beta.values().sum()
    }

    /// Largest block size, 0 when empty.
    pub fn ell(&self) -> usize {
        self.beta.keys().next_back().copied().unwrap_or(0)
    }

    /// Block sizes in nonincreasing order.
    pub fn partials(&self) -> Vec<usize> {
        self.beta
            .iter()
            .rev()
            .flat_map(|(&l, &c)| std::iter::repeat(l).take(c))
            .collect()
    }

    // β(l) = r(l−1) − 2r(l) + r(l+1) style second differences may come out
    // negative when rank decisions are inconsistent.
    fn from_signed(raw: &[(usize, i64)], what: &str) -> Result<Self> {
        let mut beta = BTreeMap::new();
        for &(l, v) in raw {
            if v < 0 {
                return Err(Error::InconsistentRanks(format!(
                    "{what}: beta({l}) = {v} is negative"
                )));
            }
            if v > 0 {
                beta.insert(l, v as usize);
            }
        }
        Ok(Self { beta })
    }
}

impl fmt::Display for PartialMultiplicityFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (l, c)) in self.beta.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{l}:{c}")?;
        }
        f.write_str("}")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Label {
    Nondegenerate,
    /// α = γ > 1; the payload is α.
    Diabolic(usize),
    /// γ = 1 < α; the payload is α.
    Exceptional(usize),
    /// α > γ > 1.
    Fragmented,
}

impl Label {
    pub fn from_multiplicities(alpha: usize, gamma: usize) -> Self {
        if alpha <= 1 {
            Label::Nondegenerate
        } else if alpha == gamma {
            Label::Diabolic(alpha)
        } else if gamma == 1 {
            Label::Exceptional(alpha)
        } else {
            Label::Fragmented
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        let num = |p: &str| s.strip_prefix(p).and_then(|r| r.parse::<usize>().ok());
        match s {
            "nondegenerate" => Some(Label::Nondegenerate),
            "FEP" => Some(Label::Fragmented),
            _ => num("DP")
                .map(Label::Diabolic)
                .or_else(|| num("EP").map(Label::Exceptional)),
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Nondegenerate => f.write_str("nondegenerate"),
            Label::Diabolic(n) => write!(f, "DP{n}"),
            Label::Exceptional(n) => write!(f, "EP{n}"),
            Label::Fragmented => f.write_str("FEP"),
        }
    }
}

/// How [`classify_point_with`] obtains the partial multiplicities.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Route {
    /// Modes with oracle cross-check up to dimension 64, oracle beyond.
    #[default]
    Auto,
    /// Adjugate modes, cross-checked against the power-rank oracle.
    Modes,
    /// Power-rank oracle only; no response strengths.
    Oracle,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DegeneracyReport {
    pub k_point: Vec<f64>,
    pub energy: C64,
    pub alpha: usize,
    pub gamma: usize,
    pub ell: usize,
    pub beta: PartialMultiplicityFunction,
    pub partials: Vec<usize>,
    pub label: Label,
    pub eta: Option<f64>,
    pub xi: Option<f64>,
    /// Ranks of `B_0..B_{α−1}`; empty on the oracle route.
    pub mode_ranks: Vec<usize>,
    pub route: Route,
    pub policy: TolerancePolicy,
}

impl DegeneracyReport {
    pub fn with_k(mut self, k: &[f64]) -> Self {
        self.k_point = k.to_vec();
        self
    }

    /// Re-checks the internal sum rules and label consistency.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InconsistentRanks(m));
        if self.beta.alpha() != self.alpha {
            return bad(format!("sum l*beta = {} != alpha = {}", self.beta.alpha(), self.alpha));
        }
        if self.beta.gamma() != self.gamma {
            return bad(format!("sum beta = {} != gamma = {}", self.beta.gamma(), self.gamma));
        }
        if self.beta.ell() != self.ell {
            return bad(format!("max l = {} != ell = {}", self.beta.ell(), self.ell));
        }
        if self.beta.partials() != self.partials {
            return bad("partials do not expand beta".into());
        }
        if Label::from_multiplicities(self.alpha, self.gamma) != self.label {
            return bad(format!("label {} inconsistent with alpha/gamma", self.label));
        }
        if let Label::Exceptional(n) = self.label {
            if n != self.alpha || self.beta.count(self.alpha) != 1 {
                return bad("EP label requires a single block of size alpha".into());
            }
        }
        Ok(())
    }
}

/// Largest α with `C_k ≈ 0` for every `k < α`. Zero means the shift is not
/// an eigenvalue.
pub fn algebraic_multiplicity(modes: &ModeSequence, policy: &TolerancePolicy) -> usize {
    (0..modes.dim())
        .find(|&k| modes.trace_condition(k).norm() > modes.trace_threshold(k, policy))
        .unwrap_or(modes.dim())
}

/// `β(l) = r(α−l−2) − 2r(α−l−1) + r(α−l)` with `r(k) = rank B_k`.
pub fn partial_multiplicities(
    modes: &ModeSequence,
    alpha: usize,
    policy: &TolerancePolicy,
) -> Result<PartialMultiplicityFunction> {
    let (beta, _) = partial_multiplicities_with_ranks(modes, alpha, policy)?;
    Ok(beta)
}

fn partial_multiplicities_with_ranks(
    modes: &ModeSequence,
    alpha: usize,
    policy: &TolerancePolicy,
) -> Result<(PartialMultiplicityFunction, Vec<usize>)> {
    policy.validate()?;
    let n = modes.dim();
    if alpha == 0 || alpha > n {
        return Err(Error::InvalidInput(format!("alpha = {alpha} outside 1..={n}")));
    }
    let mut ranks = Vec::with_capacity(alpha);
    for k in 0..alpha {
        ranks.push(modes.mode_rank(k as isize, policy)?);
    }
    let r = |k: isize| -> i64 {
        if k < 0 {
            0
        } else {
            ranks[k as usize] as i64
        }
    };
    let a = alpha as isize;
    let raw: Vec<(usize, i64)> = (1..=alpha)
        .map(|l| {
            let l_ = l as isize;
            (l, r(a - l_ - 2) - 2 * r(a - l_ - 1) + r(a - l_))
        })
        .collect();
    let beta = PartialMultiplicityFunction::from_signed(&raw, "mode ranks")?;
    if beta.alpha() != alpha {
        return Err(Error::InconsistentRanks(format!(
            "mode ranks {ranks:?}: sum l*beta = {} but alpha = {alpha}",
            beta.alpha()
        )));
    }
    let a = modes.shifted_matrix();
    let gamma = n - power_rank(a, 1, modes.source_norm(), policy)?;
    if beta.gamma() != gamma {
        return Err(Error::InconsistentRanks(format!(
            "mode ranks {ranks:?}: sum beta = {} but N - rank(A) = {gamma}",
            beta.gamma()
        )));
    }
    Ok((beta, ranks))
}

// Rank of `p = A^k`: zero when every entry is below `ck_rel·(1+‖A‖₂)^k`,
// otherwise the usual relative cutoff.
fn power_rank(p: &ComplexMatrix, k: usize, norm: f64, policy: &TolerancePolicy) -> Result<usize> {
    let vanish = policy.ck_rel * (1.0 + norm).powi(k as i32);
    if p.max_abs() <= vanish {
        return Ok(0);
    }
    let sv = singular_values(p)?;
    Ok(rank_above(&sv, policy.rank_cutoff(sv[0], p.frobenius_norm())))
}

/// Ranks of `A^k` for `k = 0, 1, ...` until they stabilize.
pub fn power_ranks(a: &ComplexMatrix, policy: &TolerancePolicy) -> Result<Vec<usize>> {
    policy.validate()?;
    let n = a.n();
    let norm = spectral_norm(a)?;
    let mut ranks = vec![n];
    let mut p = ComplexMatrix::identity(n);
    for k in 1..=n {
        p = p.matmul(a);
        let rk = power_rank(&p, k, norm, policy)?;
        let prev = ranks[k - 1];
        ranks.push(rk);
        if rk == prev || rk == 0 {
            break;
        }
    }
    Ok(ranks)
}

/// Partial multiplicities at eigenvalue 0 of `a` from the ranks of its powers.
pub fn weyr_oracle(a: &ComplexMatrix, policy: &TolerancePolicy) -> Result<PartialMultiplicityFunction> {
    let ranks = power_ranks(a, policy)?;
    if ranks[1] >= ranks[0] {
        return Err(Error::NotAnEigenvalue {
            energy: C64::new(0.0, 0.0),
            detail: "the shifted matrix has full rank".into(),
        });
    }
    if ranks.windows(2).any(|w| w[1] > w[0]) {
        return Err(Error::InconsistentRanks(format!("power ranks {ranks:?} increase")));
    }
    let last = *ranks.last().unwrap() as i64;
    let r = |k: usize| ranks.get(k).map(|&x| x as i64).unwrap_or(last);
    let raw: Vec<(usize, i64)> = (1..ranks.len())
        .map(|l| (l, r(l - 1) - 2 * r(l) + r(l + 1)))
        .collect();
    PartialMultiplicityFunction::from_signed(&raw, &format!("power ranks {ranks:?}"))
}

/// Full fingerprint of the eigenvalue `energy` of `h`.
///
/// Whether `energy` is an eigenvalue at all is decided by the vanishing of
/// `C_0` (or by rank deficiency of `h − energy` on the oracle route), never by
/// eigenvalue proximity: near an EPn computed eigenvalues scatter by
/// roughly `ε_mach^{1/n}`.
pub fn classify_point(h: &ComplexMatrix, energy: C64, policy: &TolerancePolicy) -> Result<DegeneracyReport> {
    classify_point_with(h, energy, policy, Route::Auto)
}

pub fn classify_point_with(
    h: &ComplexMatrix,
    energy: C64,
    policy: &TolerancePolicy,
    route: Route,
) -> Result<DegeneracyReport> {
    policy.validate()?;
    let route = match route {
        Route::Auto if h.n() <= FLV_MAX_DIM => Route::Modes,
        Route::Auto => Route::Oracle,
        r => r,
    };
    let a = h.shifted(energy);
    let oracle = weyr_oracle(&a, policy)?;

    let (beta, eta, xi, mode_ranks) = if route == Route::Modes {
        let modes = flv_modes(h, energy)?;
        let alpha = algebraic_multiplicity(&modes, policy);
        if alpha == 0 {
            return Err(Error::NotAnEigenvalue {
                energy,
                detail: format!("|C_0| = {:.3e} does not vanish", modes.trace_condition(0).norm()),
            });
        }
        let (beta, ranks) = partial_multiplicities_with_ranks(&modes, alpha, policy)?;
        if beta != oracle {
            return Err(Error::OracleDisagreement {
                modes: beta,
                oracle,
            });
        }
        let rs = response_strengths(&modes, alpha, beta.ell(), policy)?;
        (beta, Some(rs.eta), Some(rs.xi), ranks)
    } else {
        (oracle, None, None, Vec::new())
    };

    let alpha = beta.alpha();
    let gamma = beta.gamma();
    let report = DegeneracyReport {
        k_point: Vec::new(),
        energy,
        alpha,
        gamma,
        ell: beta.ell(),
        partials: beta.partials(),
        label: Label::from_multiplicities(alpha, gamma),
        beta,
        eta,
        xi,
        mode_ranks,
        route,
        policy: *policy,
    };
    report.validate()?;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testgen::jordan_direct_sum;

    fn zero() -> C64 {
        C64::new(0.0, 0.0)
    }

    #[test]
    fn pmf_accessors() {
        let b = PartialMultiplicityFunction::from_partials(&[4, 4, 3, 2, 2, 1]).unwrap();
        assert_eq!(b.alpha(), 16);
        assert_eq!(b.gamma(), 6);
        assert_eq!(b.ell(), 4);
        assert_eq!(b.partials(), vec![4, 4, 3, 2, 2, 1]);
        assert_eq!(b.to_string(), "{1:1, 2:2, 3:1, 4:2}");
    }

    #[test]
    fn labels() {
        assert_eq!(Label::from_multiplicities(1, 1), Label::Nondegenerate);
        assert_eq!(Label::from_multiplicities(3, 3), Label::Diabolic(3));
        assert_eq!(Label::from_multiplicities(4, 1), Label::Exceptional(4));
        assert_eq!(Label::from_multiplicities(3, 2), Label::Fragmented);
        for l in [
            Label::Nondegenerate,
            Label::Diabolic(4),
            Label::Exceptional(3),
            Label::Fragmented,
        ] {
            assert_eq!(Label::parse(&l.to_string()), Some(l));
        }
    }

    #[test]
    fn simple_eigenvalue_multiplicity() {
        let h = ComplexMatrix::diagonal(&[C64::new(1.0, 0.0), C64::new(2.0, 0.0), C64::new(3.0, 0.0)])
            .unwrap();
        let m = flv_modes(&h, C64::new(1.0, 0.0)).unwrap();
        assert_eq!(algebraic_multiplicity(&m, &TolerancePolicy::default()), 1);
        let m = flv_modes(&h, C64::new(1.5, 0.0)).unwrap();
        assert_eq!(algebraic_multiplicity(&m, &TolerancePolicy::default()), 0);
    }

    #[test]
    fn oracle_on_small_jordan_structures() {
        let p = TolerancePolicy::default();
        let j3 = jordan_direct_sum(&[3]);
        let b = weyr_oracle(&j3, &p).unwrap();
        assert_eq!(b.partials(), vec![3]);
        let j21 = jordan_direct_sum(&[2, 1]);
        assert_eq!(weyr_oracle(&j21, &p).unwrap().partials(), vec![2, 1]);
        assert_eq!(power_ranks(&j21, &p).unwrap(), vec![3, 1, 0]);
    }

    #[test]
    fn oracle_rejects_invertible() {
        let p = TolerancePolicy::default();
        assert!(matches!(
            weyr_oracle(&ComplexMatrix::identity(2), &p),
            Err(Error::NotAnEigenvalue { .. })
        ));
    }

    #[test]
    fn classify_rejects_non_eigenvalue() {
        let h = ComplexMatrix::diagonal(&[C64::new(1.0, 0.0), C64::new(2.0, 0.0)]).unwrap();
        let r = classify_point(&h, C64::new(1.5, 0.0), &TolerancePolicy::default());
        assert!(matches!(r, Err(Error::NotAnEigenvalue { .. })));
    }

    #[test]
    fn classify_jordan_sum() {
        let h = jordan_direct_sum(&[2, 1]);
        let r = classify_point(&h, zero(), &TolerancePolicy::default()).unwrap();
        assert_eq!((r.alpha, r.gamma, r.ell), (3, 2, 2));
        assert_eq!(r.label, Label::Fragmented);
        assert_eq!(r.mode_ranks, vec![0, 1, 3]);
        assert!((r.eta.unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn oracle_route_skips_strengths() {
        let h = jordan_direct_sum(&[3, 1]);
        let r = classify_point_with(&h, zero(), &TolerancePolicy::default(), Route::Oracle).unwrap();
        assert_eq!(r.partials, vec![3, 1]);
        assert!(r.eta.is_none() && r.mode_ranks.is_empty());
    }

    #[test]
    fn validate_catches_tampering() {
        let h = jordan_direct_sum(&[2, 2]);
        let mut r = classify_point(&h, zero(), &TolerancePolicy::default()).unwrap();
        assert!(r.validate().is_ok());
        r.gamma = 3;
        assert!(r.validate().is_err());
    }
}
