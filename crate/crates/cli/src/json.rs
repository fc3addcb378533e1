//! JSON emission with a fixed key order and floats at 17 significant
//! digits, plus the inverse for degeneracy reports.

use std::collections::BTreeMap;
use std::io;

use serde::Serialize;
use serde_json::ser::Formatter;
use serde_json::{json, Map, Value};

use fepkit::{DegeneracyReport, Label, PartialMultiplicityFunction, Route, TolerancePolicy, C64};

use crate::error::CliError;

/// Compact output, except that every float is written as `d.dddddddddddddddde±x`.
struct FixedDigits;

impl Formatter for FixedDigits {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        write!(w, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, value as f64)
    }
}

pub fn to_string(v: &Value) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, FixedDigits);
    v.serialize(&mut ser).expect("serializing a Value into memory cannot fail");
    let mut s = String::from_utf8(buf).expect("serde_json writes UTF-8");
    s.push('\n');
    s
}

/// `null` for non-finite values so the document stays valid JSON.
pub fn num(x: f64) -> Value {
    serde_json::Number::from_f64(x).map(Value::Number).unwrap_or(Value::Null)
}

pub fn nums(xs: &[f64]) -> Value {
    Value::Array(xs.iter().map(|&x| num(x)).collect())
}

pub fn complex(z: C64) -> Value {
    json!({ "re": num(z.re), "im": num(z.im) })
}

pub fn opt(x: Option<f64>) -> Value {
    x.map(num).unwrap_or(Value::Null)
}

/// Seconds since the Unix epoch, or `SOURCE_DATE_EPOCH` when set.
pub fn timestamp() -> Value {
    if let Some(t) = std::env::var("SOURCE_DATE_EPOCH").ok().and_then(|s| s.parse::<u64>().ok()) {
        return json!(t);
    }
    let now = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    json!(now)
}

pub fn policy(p: &TolerancePolicy) -> Value {
    json!({
        "rank_rel": num(p.rank_rel),
        "rank_abs": num(p.rank_abs),
        "ck_rel": num(p.ck_rel),
        "cluster_tol": num(p.cluster_tol),
    })
}

/// Report fields from `k` through `xi`.
pub fn report_fields(r: &DegeneracyReport) -> Map<String, Value> {
    let beta: Map<String, Value> = r.beta.beta().iter().map(|(l, c)| (l.to_string(), json!(c))).collect();
    let mut m = Map::new();
    m.insert("k".into(), nums(&r.k_point));
    m.insert("energy".into(), complex(r.energy));
    m.insert("alpha".into(), json!(r.alpha));
    m.insert("gamma".into(), json!(r.gamma));
    m.insert("ell".into(), json!(r.ell));
    m.insert("beta".into(), Value::Object(beta));
    m.insert("partials".into(), json!(r.partials));
    m.insert("label".into(), json!(r.label.to_string()));
    m.insert("eta".into(), opt(r.eta));
    m.insert("xi".into(), opt(r.xi));
    m
}

/// Full report document: the report fields, then policy, model and timestamp.
pub fn report_document(r: &DegeneracyReport, model: Value) -> Value {
    let mut m = report_fields(r);
    m.insert("policy".into(), policy(&r.policy));
    m.insert("model".into(), model);
    m.insert("timestamp".into(), timestamp());
    Value::Object(m)
}

fn field<'a>(v: &'a Value, key: &str) -> Result<&'a Value, CliError> {
    v.get(key).ok_or_else(|| CliError::Usage(format!("report is missing {key:?}")))
}

fn as_usize(v: &Value, key: &str) -> Result<usize, CliError> {
    field(v, key)?
        .as_u64()
        .map(|x| x as usize)
        .ok_or_else(|| CliError::Usage(format!("{key:?} is not a non-negative integer")))
}

fn as_f64(v: &Value, key: &str) -> Result<f64, CliError> {
    field(v, key)?
        .as_f64()
        .ok_or_else(|| CliError::Usage(format!("{key:?} is not a number")))
}

/// Rebuilds a report from its JSON form and re-checks its sum rules.
pub fn parse_report(v: &Value) -> Result<DegeneracyReport, CliError> {
    let k = field(v, "k")?
        .as_array()
        .ok_or_else(|| CliError::Usage("\"k\" is not an array".into()))?
        .iter()
        .map(|x| x.as_f64().ok_or_else(|| CliError::Usage("non-numeric k component".into())))
        .collect::<Result<Vec<_>, _>>()?;
    let energy = field(v, "energy")?;
    let energy = C64::new(as_f64(energy, "re")?, as_f64(energy, "im")?);
    let mut beta = BTreeMap::new();
    for (l, c) in field(v, "beta")?
        .as_object()
        .ok_or_else(|| CliError::Usage("\"beta\" is not an object".into()))?
    {
        let l: usize = l.parse().map_err(|_| CliError::Usage(format!("beta key {l:?} is not an integer")))?;
        let c = c.as_u64().ok_or_else(|| CliError::Usage("beta count is not an integer".into()))?;
        beta.insert(l, c as usize);
    }
    let partials = field(v, "partials")?
        .as_array()
        .ok_or_else(|| CliError::Usage("\"partials\" is not an array".into()))?
        .iter()
        .map(|x| x.as_u64().map(|x| x as usize).ok_or_else(|| CliError::Usage("bad partial".into())))
        .collect::<Result<Vec<_>, _>>()?;
    let label_text = field(v, "label")?.as_str().unwrap_or_default();
    let label = Label::parse(label_text).ok_or_else(|| CliError::Usage(format!("unknown label {label_text:?}")))?;
    let p = field(v, "policy")?;
    let policy = TolerancePolicy {
        rank_rel: as_f64(p, "rank_rel")?,
        rank_abs: as_f64(p, "rank_abs")?,
        ck_rel: as_f64(p, "ck_rel")?,
        cluster_tol: as_f64(p, "cluster_tol")?,
    };
    let eta = field(v, "eta")?.as_f64();
    let xi = field(v, "xi")?.as_f64();
    let report = DegeneracyReport {
        k_point: k,
        energy,
        alpha: as_usize(v, "alpha")?,
        gamma: as_usize(v, "gamma")?,
        ell: as_usize(v, "ell")?,
        beta: PartialMultiplicityFunction::from_map(beta)?,
        partials,
        label,
        route: if eta.is_some() { Route::Modes } else { Route::Oracle },
        eta,
        xi,
        mode_ranks: Vec::new(),
        policy,
    };
    report.validate()?;
    Ok(report)
}
