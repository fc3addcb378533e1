//! Turns flags into models, momenta, energies and tolerance policies.

use serde_json::{json, Value};

use fepkit::{HodsmSpec, LiebSpec, ModelSpec, TolerancePolicy, C64};

use crate::angle::{parse_angle, parse_angles};
use crate::args::{ModelArgs, PointArgs, TolArgs};
use crate::error::CliError;
use crate::json::num;

fn need<T>(v: Option<T>, flag: &str, model: &str) -> Result<T, CliError> {
    v.ok_or_else(|| CliError::Usage(format!("--{flag} is required for {model}")))
}

fn angle(v: &Option<String>, flag: &str, model: &str) -> Result<f64, CliError> {
    parse_angle(need(v.as_deref(), flag, model)?)
}

pub fn build_model(a: &ModelArgs) -> Result<ModelSpec, CliError> {
    let id = a.model.as_str();
    let m = match id {
        "lieb:hermitian" => LiebSpec::Hermitian.into(),
        "lieb:nh-symmetric" => LiebSpec::NhSymmetric {
            epsilon: need(a.eps, "eps", id)?,
        }
        .into(),
        "lieb:minimal-fep" => LiebSpec::MinimalFep {
            epsilon: need(a.eps, "eps", id)?,
        }
        .into(),
        "lieb:reciprocal" => LiebSpec::Reciprocal {
            phi: angle(&a.phi, "phi", id)?,
            psi: angle(&a.psi, "psi", id)?,
        }
        .into(),
        _ => {
            let variant = match id {
                "hodsm:h" | "hodsm:hermitian" => 0,
                "hodsm:nh1" => 1,
                "hodsm:nh2" => 2,
                "hodsm:nh3" => 3,
                "hodsm:nh4" => 4,
                _ => return Err(CliError::Usage(format!("unknown model {id:?}"))),
            };
            let eps = if variant == 0 { a.eps.unwrap_or(0.0) } else { need(a.eps, "eps", id)? };
            HodsmSpec::new(variant, a.t.unwrap_or(-1.0), a.s.unwrap_or(1.0), eps)?.into()
        }
    };
    Ok(m)
}

pub fn model_json(m: &ModelSpec) -> Value {
    match m {
        ModelSpec::Lieb(l) => match l {
            LiebSpec::NhSymmetric { epsilon } | LiebSpec::MinimalFep { epsilon } => {
                json!({ "id": l.id(), "eps": num(*epsilon) })
            }
            LiebSpec::Reciprocal { phi, psi } => json!({ "id": l.id(), "phi": num(*phi), "psi": num(*psi) }),
            _ => json!({ "id": l.id() }),
        },
        ModelSpec::Hodsm(h) => json!({
            "id": h.id(),
            "variant": h.variant,
            "t": num(h.t),
            "s": num(h.s),
            "eps": num(if h.variant == 0 { 0.0 } else { h.epsilon }),
        }),
    }
}

pub fn hodsm(m: &ModelSpec) -> Result<&HodsmSpec, CliError> {
    match m {
        ModelSpec::Hodsm(h) => Ok(h),
        _ => Err(CliError::Usage(format!("{} is not a HODSM model", m.id()))),
    }
}

/// Momentum for `model`. HODSM accepts `--kz` alone (kx = ky = 0) or
/// `--k kx,ky --kz kz`.
pub fn resolve_k(model: &ModelSpec, p: &PointArgs, required: bool) -> Result<Vec<f64>, CliError> {
    let dims = model.k_dims();
    let mut k = match &p.k {
        Some(s) => parse_angles(s)?,
        None if required && (dims == 2 || p.kz.is_none()) => {
            return Err(CliError::Usage(format!("--k is required for {}", model.id())))
        }
        None => vec![0.0; dims.min(2)],
    };
    if let Some(kz) = &p.kz {
        if dims != 3 {
            return Err(CliError::Usage(format!("--kz does not apply to {}", model.id())));
        }
        if k.len() != 2 {
            return Err(CliError::Usage("--kz needs --k with two components".into()));
        }
        k.push(parse_angle(kz)?);
    } else if dims == 3 && k.len() == 2 {
        k.push(0.0);
    }
    if k.len() != dims {
        return Err(CliError::Usage(format!(
            "{} takes {dims} momentum components, got {}",
            model.id(),
            k.len()
        )));
    }
    Ok(k)
}

/// `re` or `re,im`.
pub fn parse_energy(s: &str) -> Result<C64, CliError> {
    let parts: Vec<&str> = s.split(',').collect();
    let p = |x: &str| {
        x.trim()
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| CliError::Usage(format!("cannot parse energy {s:?}")))
    };
    match parts.as_slice() {
        [re] => Ok(C64::new(p(re)?, 0.0)),
        [re, im] => Ok(C64::new(p(re)?, p(im)?)),
        _ => Err(CliError::Usage(format!("cannot parse energy {s:?}"))),
    }
}

pub fn build_policy(t: &TolArgs) -> Result<TolerancePolicy, CliError> {
    let mut p = TolerancePolicy::default();
    if let Some(r) = t.rank_tol {
        p.rank_rel = r;
    }
    if let Some(c) = t.cluster_tol {
        p.cluster_tol = c;
    }
    p.validate()?;
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn args(model: &str) -> ModelArgs {
        ModelArgs {
            model: model.into(),
            eps: None,
            t: None,
            s: None,
            phi: None,
            psi: None,
        }
    }

    #[test]
    fn missing_parameters_are_usage_errors() {
        for id in ["lieb:nh-symmetric", "lieb:reciprocal", "hodsm:nh3", "lieb:nope"] {
            assert_eq!(build_model(&args(id)).unwrap_err().exit_code(), 2, "{id}");
        }
        assert!(build_model(&args("hodsm:h")).is_ok());
    }

    #[test]
    fn hodsm_momentum_forms() {
        let m = build_model(&args("hodsm:h")).unwrap();
        let p = |k: Option<&str>, kz: Option<&str>| PointArgs {
            k: k.map(Into::into),
            kz: kz.map(Into::into),
        };
        let pi = std::f64::consts::PI;
        assert_eq!(resolve_k(&m, &p(None, Some("pi/2")), true).unwrap(), vec![0.0, 0.0, pi / 2.0]);
        assert_eq!(resolve_k(&m, &p(Some("pi,0"), Some("1")), true).unwrap(), vec![pi, 0.0, 1.0]);
        assert_eq!(resolve_k(&m, &p(Some("0,0,1"), None), true).unwrap(), vec![0.0, 0.0, 1.0]);
        assert!(resolve_k(&m, &p(Some("0,0,1"), Some("1")), true).is_err());
        assert!(resolve_k(&m, &p(None, None), true).is_err());
    }

    #[test]
    fn energies() {
        assert_eq!(parse_energy("0").unwrap(), C64::new(0.0, 0.0));
        assert_eq!(parse_energy("1,-2").unwrap(), C64::new(1.0, -2.0));
        assert!(parse_energy("1,2,3").is_err());
    }

    #[test]
    fn policy_flags() {
        let p = build_policy(&TolArgs {
            rank_tol: Some(1e-6),
            cluster_tol: None,
        })
        .unwrap();
        assert_eq!(p.rank_rel, 1e-6);
        let bad = build_policy(&TolArgs {
            rank_tol: Some(2.0),
            cluster_tol: None,
        });
        assert_eq!(bad.unwrap_err().exit_code(), 2);
    }
}
