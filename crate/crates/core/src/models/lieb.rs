//! Three-band Lieb-lattice Bloch Hamiltonians
//! `H = [[0, P, 0], [Q, 0, R], [0, S, 0]]`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::matkit::{ComplexMatrix, TolerancePolicy, C64};

/// Maps `(kx, ky)` to `[P, Q, R, S]`.
pub type PqrsFn = Arc<dyn Fn([f64; 2]) -> [C64; 4] + Send + Sync>;

#[derive(Clone)]
pub enum LiebSpec {
    Hermitian,
    NhSymmetric { epsilon: f64 },
    MinimalFep { epsilon: f64 },
    Reciprocal { phi: f64, psi: f64 },
    General(PqrsFn),
}

impl fmt::Debug for LiebSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LiebSpec::Hermitian => f.write_str("Hermitian"),
            LiebSpec::NhSymmetric { epsilon } => write!(f, "NhSymmetric {{ epsilon: {epsilon} }}"),
            LiebSpec::MinimalFep { epsilon } => write!(f, "MinimalFep {{ epsilon: {epsilon} }}"),
            LiebSpec::Reciprocal { phi, psi } => write!(f, "Reciprocal {{ phi: {phi}, psi: {psi} }}"),
            LiebSpec::General(_) => f.write_str("General(..)"),
        }
    }
}

fn cis(x: f64) -> C64 {
    C64::from_polar(1.0, x)
}

impl LiebSpec {
    /// General model with intracell amplitudes:
    /// `P = p + e^{iky}`, `Q = q + e^{−iky}`, `R = r + e^{−ikx}`, `S = s + e^{ikx}`.
    pub fn intracell(p: C64, q: C64, r: C64, s: C64) -> Self {
        LiebSpec::General(Arc::new(move |[kx, ky]: [f64; 2]| {
            [p + cis(ky), q + cis(-ky), r + cis(-kx), s + cis(kx)]
        }))
    }

    pub fn general(f: impl Fn([f64; 2]) -> [C64; 4] + Send + Sync + 'static) -> Self {
        LiebSpec::General(Arc::new(f))
    }

    pub fn id(&self) -> &'static str {
        match self {
            LiebSpec::Hermitian => "lieb:hermitian",
            LiebSpec::NhSymmetric { .. } => "lieb:nh-symmetric",
            LiebSpec::MinimalFep { .. } => "lieb:minimal-fep",
            LiebSpec::Reciprocal { .. } => "lieb:reciprocal",
            LiebSpec::General(_) => "lieb:general",
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match self {
            LiebSpec::NhSymmetric { epsilon } | LiebSpec::MinimalFep { epsilon } => epsilon.is_finite(),
            LiebSpec::Reciprocal { phi, psi } => phi.is_finite() && psi.is_finite(),
            _ => true,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!("non-finite parameter in {self:?}")))
        }
    }

    pub fn pqrs(&self, k: [f64; 2]) -> Result<[C64; 4]> {
        self.validate()?;
        if !(k[0].is_finite() && k[1].is_finite()) {
            return Err(Error::InvalidInput("non-finite momentum".into()));
        }
        let [kx, ky] = k;
        let one = C64::new(1.0, 0.0);
        let i = C64::new(0.0, 1.0);
        Ok(match *self {
            LiebSpec::Hermitian => [one + cis(ky), one + cis(-ky), one + cis(-kx), one + cis(kx)],
            LiebSpec::NhSymmetric { epsilon: e } => [
                one + cis(ky) + i * e,
                one + cis(-ky) + i * e,
                one + cis(-kx) - i * e,
                one + cis(kx) - i * e,
            ],
            LiebSpec::MinimalFep { epsilon: e } => [
                one + cis(ky) + i * e,
                one + cis(-ky),
                one + cis(-kx),
                one + cis(kx) - i * e,
            ],
            LiebSpec::Reciprocal { phi, psi } => [
                cis(ky) - cis(phi),
                cis(-ky) - cis(phi),
                cis(-kx) - cis(psi),
                cis(kx) - cis(psi),
            ],
            LiebSpec::General(ref f) => f(k),
        })
    }
}

/// `[[0, P, 0], [Q, 0, R], [0, S, 0]]`.
pub fn lieb_from_pqrs(pqrs: [C64; 4]) -> Result<ComplexMatrix> {
    let [p, q, r, s] = pqrs;
    let z = C64::new(0.0, 0.0);
    ComplexMatrix::from_rows(&[vec![z, p, z], vec![q, z, r], vec![z, s, z]])
}

pub fn lieb_bloch(spec: &LiebSpec, k: [f64; 2]) -> Result<ComplexMatrix> {
    lieb_from_pqrs(spec.pqrs(k)?)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LiebCase {
    /// `(|P|+|S|)(|Q|+|R|) > 0`: a single nonvanishing mode, EP3 when degenerate.
    Case1,
    /// Product vanishes but not all amplitudes do: FEP when degenerate.
    Case2,
    /// All amplitudes vanish: tribolic point.
    Case3,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LiebCaseReport {
    pub case: LiebCase,
    /// `PQ + RS ≈ 0`, i.e. a threefold zero of the characteristic polynomial.
    pub degenerate: bool,
}

pub fn lieb_case(p: C64, q: C64, r: C64, s: C64, policy: &TolerancePolicy) -> LiebCaseReport {
    let scale = 1.0 + [p, q, r, s].iter().map(|z| z.norm()).fold(0.0, f64::max);
    let tol = policy.ck_rel * scale;
    let zero = |x: f64| x <= tol;
    let ps = p.norm() + s.norm();
    let qr = q.norm() + r.norm();
    let case = if zero(ps) && zero(qr) {
        LiebCase::Case3
    } else if zero(ps) || zero(qr) {
        LiebCase::Case2
    } else {
        LiebCase::Case1
    };
    LiebCaseReport {
        case,
        degenerate: (p * q + r * s).norm() <= policy.ck_rel * scale * scale,
    }
}

/// `2·arccot(x)` with arccot taking values in (0, π).
pub fn two_arccot(x: f64) -> f64 {
    2.0 * (PI / 2.0 - x.atan())
}
