//! Four-band higher-order Dirac semimetal, Hermitian and with the four
//! non-Hermitian additions `h⁽¹⁾..h⁽⁴⁾`.

use faer::Mat;

use crate::error::{Error, Result};
use crate::matkit::{ComplexMatrix, C64};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HodsmSpec {
    /// 0 is Hermitian, 1..=4 select the non-Hermitian addition.
    pub variant: u8,
    pub t: f64,
    pub s: f64,
    /// Ignored for variant 0.
    pub epsilon: f64,
}

impl HodsmSpec {
    pub fn new(variant: u8, t: f64, s: f64, epsilon: f64) -> Result<Self> {
        let spec = Self {
            variant,
            t,
            s,
            epsilon,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Variant at `s = −t = 1`.
    pub fn standard(variant: u8, epsilon: f64) -> Self {
        Self {
            variant,
            t: -1.0,
            s: 1.0,
            epsilon,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.variant > 4 {
            return Err(Error::InvalidInput(format!("unknown variant {}", self.variant)));
        }
        if !(self.t.is_finite() && self.s.is_finite() && self.epsilon.is_finite()) {
            return Err(Error::InvalidInput("non-finite parameter".into()));
        }
        if self.s == 0.0 {
            return Err(Error::InvalidInput("s must be nonzero".into()));
        }
        Ok(())
    }

    pub fn id(&self) -> String {
        match self.variant {
            0 => "hodsm:h".to_string(),
            v => format!("hodsm:nh{v}"),
        }
    }

    pub(crate) fn eps(&self) -> f64 {
        if self.variant == 0 {
            0.0
        } else {
            self.epsilon
        }
    }
}

/// The constant non-Hermitian addition of a variant; zero for variant 0.
pub fn h_addition(variant: u8, epsilon: f64) -> Result<ComplexMatrix> {
    let mut m = Mat::<C64>::zeros(4, 4);
    let e = C64::new(epsilon, 0.0);
    match variant {
        0 => {}
        1 => {
            m[(1, 2)] = e;
            m[(2, 1)] = -e;
        }
        2 => {
            m[(0, 2)] = e;
            m[(2, 1)] = -e;
        }
        3 => {
            m[(0, 2)] = -e;
            m[(1, 3)] = e;
        }
        4 => {
            m[(0, 2)] = e;
            m[(1, 2)] = -e;
        }
        v => return Err(Error::InvalidInput(format!("unknown variant {v}"))),
    }
    ComplexMatrix::from_mat(m)
}

/// Bloch matrix `[[0, P], [P†, 0]] + h` with `P = Σ p_i σ_i`.
pub fn hodsm_bloch(spec: &HodsmSpec, k: [f64; 3]) -> Result<ComplexMatrix> {
    spec.validate()?;
    if k.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidInput("non-finite momentum".into()));
    }
    let [kx, ky, kz] = k;
    let (t, s) = (spec.t, spec.s);
    let i = C64::new(0.0, 1.0);
    let p0 = C64::new(t + s * kx.cos() + 0.5 * s * kz.cos(), 0.0);
    let p1 = i * (s * ky.sin());
    let p2 = i * (t + s * ky.cos() + 0.5 * s * kz.cos());
    let p3 = i * (s * kx.sin());
    // σ0, σx, σy, σz combination.
    let p = [[p0 + p3, p1 - i * p2], [p1 + i * p2, p0 - p3]];
    let mut m = Mat::<C64>::zeros(4, 4);
    for a in 0..2 {
        for b in 0..2 {
            m[(a, b + 2)] = p[a][b];
            m[(b + 2, a)] = p[a][b].conj();
        }
    }
    let h = ComplexMatrix::from_mat(m)?;
    Ok(&h + &h_addition(spec.variant, spec.eps())?)
}

fn csqrt(x: C64) -> C64 {
    x.sqrt()
}

/// Closed-form bands on the `kx = ky = 0` line at `s = −t = 1`.
pub fn hodsm_closed_dispersion(spec: &HodsmSpec, kz: f64) -> Result<Vec<C64>> {
    spec.validate()?;
    if (spec.t + 1.0).abs() > 1e-12 || (spec.s - 1.0).abs() > 1e-12 {
        return Err(Error::Unsupported(
            "closed-form bands are available only for s = -t = 1".into(),
        ));
    }
    let c = C64::new(kz.cos(), 0.0);
    let e = C64::new(spec.eps(), 0.0);
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let pair = |w: C64| [w * r, -w * r];
    let bands: Vec<C64> = match spec.variant {
        0 => {
            let w = C64::new(kz.cos().abs(), 0.0);
            [pair(w), pair(w)].concat()
        }
        1 => [1.0, -1.0]
            .iter()
            .flat_map(|&sg| pair(csqrt(c * c - e * e + sg * e * csqrt(e * e - c * c))))
            .collect(),
        2 => {
            let w = csqrt(c * (e + c));
            [pair(w), pair(w)].concat()
        }
        3 => [1.0, -1.0]
            .iter()
            .flat_map(|&sg| pair(csqrt(c) * csqrt(c + sg * std::f64::consts::SQRT_2 * e)))
            .collect(),
        4 => [2.0, 0.0]
            .iter()
            .flat_map(|&f| pair(csqrt(c * c + f * e * c)))
            .collect(),
        _ => unreachable!("validated"),
    };
    Ok(bands)
}
