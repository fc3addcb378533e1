use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde_json::{json, Map, Value};

use fepkit::matkit::eigenvalues;
use fepkit::probes::hinge::DEFAULT_EIG_CAP;
use fepkit::probes::{
    decay_rate_fit, hinge_report, lineshape_exponent, splitting_exponent, Axis, DecayFit, ExponentFit, HingeOptions,
    SplittingConfig,
};
use fepkit::scan::{bz_scan, trace_ring, DegeneracyCandidate, ScanGrid};
use fepkit::selftest::{criterion_names, run_one};
use fepkit::{classify_point, Corner, HingeGeometry, LiebSpec, ModelSpec, C64};

use crate::angle::parse_angle;
use crate::args::*;
use crate::error::CliError;
use crate::json::{self, complex, num, nums, opt, report_document, report_fields, timestamp};
use crate::model::{build_model, build_policy, hodsm, model_json, parse_energy, resolve_k};
use crate::output::{cell, emit, write_atomic};

pub fn run(cmd: Command) -> Result<(), CliError> {
    match cmd {
        Command::Classify(a) => classify(a),
        Command::Band(a) => band(a),
        Command::Contour(a) => contour(a),
        Command::Scan(a) => scan(a),
        Command::Ring(a) => ring(a),
        Command::Hinge(a) => hinge(a),
        Command::Probe(a) => probe(a),
        Command::Selftest(a) => selftest(a),
    }
}

fn classify(a: ClassifyArgs) -> Result<(), CliError> {
    let model = build_model(&a.model)?;
    let policy = build_policy(&a.tol)?;
    let k = resolve_k(&model, &a.point, true)?;
    let energy = parse_energy(&a.energy)?;
    let report = classify_point(&model.bloch(&k)?, energy, &policy)?.with_k(&k);
    emit(a.out.as_deref(), &json::to_string(&report_document(&report, model_json(&model))))
}

/// Eigenvalues sorted by real part, then imaginary part.
fn sorted_bands(model: &ModelSpec, k: &[f64]) -> Result<Vec<C64>, CliError> {
    let mut ev = eigenvalues(&model.bloch(k)?)?;
    ev.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    Ok(ev)
}

/// `axis=start:end:count`, endpoints included.
pub fn parse_path(s: &str, dims: usize) -> Result<(usize, Vec<f64>), CliError> {
    let bad = |why: &str| CliError::Usage(format!("bad --path {s:?}: {why}"));
    let (axis, range) = s.split_once('=').ok_or_else(|| bad("expected axis=start:end:count"))?;
    let axis = match axis.trim() {
        "kx" => 0,
        "ky" => 1,
        "kz" => 2,
        _ => return Err(bad("axis must be kx, ky or kz")),
    };
    if axis >= dims {
        return Err(bad("axis does not exist for this model"));
    }
    let parts: Vec<&str> = range.split(':').collect();
    let [start, end, count] = parts.as_slice() else {
        return Err(bad("expected start:end:count"));
    };
    let (start, end) = (parse_angle(start)?, parse_angle(end)?);
    let count: usize = count.trim().parse().map_err(|_| bad("count is not an integer"))?;
    if count < 2 {
        return Err(bad("count must be at least 2"));
    }
    let last = (count - 1) as f64;
    Ok((axis, (0..count).map(|i| start + (end - start) * (i as f64 / last)).collect()))
}

fn band(a: BandArgs) -> Result<(), CliError> {
    let model = build_model(&a.model)?;
    let (axis, values) = parse_path(&a.path, model.k_dims())?;
    let mut k = resolve_k(&model, &a.point, false)?;
    let mut csv = String::from("kx,ky,kz,band_index,re_E,im_E\n");
    for v in values {
        k[axis] = v;
        let kz = k.get(2).map(|&z| cell(z)).unwrap_or_default();
        for (i, e) in sorted_bands(&model, &k)?.iter().enumerate() {
            let _ = writeln!(csv, "{},{},{kz},{i},{},{}", cell(k[0]), cell(k[1]), cell(e.re), cell(e.im));
        }
    }
    emit(a.out.as_deref(), &csv)
}

fn contour(a: ContourArgs) -> Result<(), CliError> {
    let model = build_model(&a.model)?;
    if a.grid < 2 {
        return Err(CliError::Usage("--grid must be at least 2".into()));
    }
    let kz = match (&a.kz, model.k_dims()) {
        (Some(s), 3) => Some(parse_angle(s)?),
        (None, 3) => Some(0.0),
        (None, _) => None,
        (Some(_), _) => return Err(CliError::Usage(format!("--kz does not apply to {}", model.id()))),
    };
    // The Lieb flat band is skipped, as in the scan detector.
    let skip = model.generic_nullity();
    let step = std::f64::consts::TAU / a.grid as f64;
    let mut csv = String::from("kx,ky,min_abs_E\n");
    for i in 0..a.grid {
        for j in 0..a.grid {
            let (kx, ky) = (-std::f64::consts::PI + step * i as f64, -std::f64::consts::PI + step * j as f64);
            let k: Vec<f64> = [kx, ky].into_iter().chain(kz).collect();
            let mut abs: Vec<f64> = eigenvalues(&model.bloch(&k)?)?.iter().map(|e| e.norm()).collect();
            abs.sort_by(f64::total_cmp);
            let _ = writeln!(csv, "{},{},{}", cell(kx), cell(ky), cell(abs[skip]));
        }
    }
    emit(a.out.as_deref(), &csv)
}

fn candidate_json(c: &DegeneracyCandidate) -> Value {
    json!({
        "k": nums(&c.k),
        "min_abs_energy": num(c.min_abs_energy),
        "residual": num(c.residual),
        "refined": c.refined,
        "iterations": c.iterations,
        "off_catalog": c.off_catalog,
        "report": c.report.as_ref().map(|r| Value::Object(report_fields(r))),
        "classification_error": c.classification_error,
    })
}

fn scan(a: ScanArgs) -> Result<(), CliError> {
    let model = build_model(&a.model)?;
    let policy = build_policy(&a.tol)?;
    let grid = ScanGrid::new(model.k_dims(), a.grid)?;
    let found = bz_scan(&model, &grid, &policy)?;
    let doc = json!({
        "model": model_json(&model),
        "grid": { "dims": grid.dims, "resolution": grid.resolution },
        "policy": json::policy(&policy),
        "candidates": found.iter().map(candidate_json).collect::<Vec<_>>(),
        "timestamp": timestamp(),
    });
    emit(a.out.as_deref(), &json::to_string(&doc))
}

fn ring(a: RingArgs) -> Result<(), CliError> {
    let model = build_model(&a.model)?;
    let ModelSpec::Lieb(spec @ LiebSpec::Reciprocal { .. }) = &model else {
        return Err(CliError::Usage("ring needs --model lieb:reciprocal".into()));
    };
    let policy = build_policy(&a.tol)?;
    let samples = trace_ring(spec, a.samples, &policy)?;
    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    let rows: Vec<Value> = samples
        .iter()
        .map(|s| {
            let label = s.report.as_ref().map_or("unclassified".to_string(), |r| r.label.to_string());
            *counts.entry(label).or_default() += 1;
            json!({
                "k": nums(&s.k),
                "case": format!("{:?}", s.case.case).to_uppercase(),
                "degenerate": s.case.degenerate,
                "report": s.report.as_ref().map(|r| Value::Object(report_fields(r))),
                "error": s.error,
            })
        })
        .collect();
    let doc = json!({
        "model": model_json(&model),
        "policy": json::policy(&policy),
        "counts": counts,
        "samples": rows,
        "timestamp": timestamp(),
    });
    emit(a.out.as_deref(), &json::to_string(&doc))
}

fn hinge(a: HingeArgs) -> Result<(), CliError> {
    let model = build_model(&a.model)?;
    let spec = hodsm(&model)?;
    let policy = build_policy(&a.tol)?;
    let kz = a.kz.as_deref().map(parse_angle).transpose()?.unwrap_or(0.0);
    let geom = HingeGeometry {
        nx: a.nx,
        ny: a.ny.unwrap_or(a.nx),
        kz,
    };
    let opts = HingeOptions {
        gram_threshold: a.gram_threshold,
        eig_cap: DEFAULT_EIG_CAP,
    };
    let r = hinge_report(spec, &geom, &opts, &policy)?;
    std::fs::create_dir_all(&a.out).map_err(|source| CliError::Io {
        path: a.out.clone(),
        source,
    })?;
    let mut files = Vec::new();
    for (i, map) in r.intensity_maps.iter().enumerate() {
        let name = format!("state_{i}.csv");
        let mut csv = String::from("x,y,intensity\n");
        for (x, col) in map.iter().enumerate() {
            for (y, v) in col.iter().enumerate() {
                let _ = writeln!(csv, "{x},{y},{}", cell(*v));
            }
        }
        write_atomic(&a.out.join(&name), csv.as_bytes())?;
        files.push(name);
    }
    let doc = json!({
        "model": model_json(&model),
        "geometry": { "nx": r.nx, "ny": r.ny, "kz": num(r.kz) },
        "low_set": r.low_set,
        "low_energies": r.low_set.iter().map(|&i| complex(r.eigenvalues[i])).collect::<Vec<_>>(),
        "gap_ratio": opt(r.gap_ratio),
        "gram": r.gram.iter().map(|row| nums(row)).collect::<Vec<_>>(),
        "gram_rank": r.gram_rank,
        "gram_threshold": num(r.gram_threshold),
        "intensity_files": files,
        "eigenvalues": r.eigenvalues.iter().map(|&e| complex(e)).collect::<Vec<_>>(),
        "policy": json::policy(&policy),
        "timestamp": timestamp(),
    });
    write_atomic(&a.out.join("hinge.json"), json::to_string(&doc).as_bytes())
}

fn fit_json(f: &ExponentFit) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("slope".into(), num(f.slope));
    m.insert("intercept".into(), num(f.intercept));
    m.insert("r_squared".into(), num(f.r_squared));
    m.insert("window".into(), nums(&[f.window.0, f.window.1]));
    m.insert("expected_slope".into(), num(f.expected_slope));
    m.insert("mean_slope".into(), opt(f.mean_slope));
    m
}

fn decay_json(f: &DecayFit) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("corner".into(), json!(f.corner.to_string()));
    m.insert("axis".into(), json!(format!("{:?}", f.axis).to_lowercase()));
    m.insert("ratio".into(), num(f.ratio));
    m.insert("r_squared".into(), num(f.r_squared));
    m.insert("expected".into(), num(f.expected));
    m.insert("corner_weight".into(), num(f.corner_weight));
    m.insert("profile".into(), nums(&f.profile));
    m
}

fn probe(a: ProbeArgs) -> Result<(), CliError> {
    let model = build_model(&a.model)?;
    let policy = build_policy(&a.tol)?;
    let mut doc = Map::new();
    doc.insert("model".into(), model_json(&model));
    doc.insert("kind".into(), json!(format!("{:?}", a.kind).to_lowercase()));
    let body = if a.kind == ProbeKind::Decay {
        let spec = hodsm(&model)?;
        let axis = match a.axis {
            AxisArg::X => Axis::X,
            AxisArg::Y => Axis::Y,
        };
        let corner = [Corner::A, Corner::B, Corner::C, Corner::D][a.corner as usize];
        let (long, short) = (30, 12);
        let geom = HingeGeometry {
            nx: a.nx.unwrap_or(if axis == Axis::X { long } else { short }),
            ny: a.ny.unwrap_or(if axis == Axis::Y { long } else { short }),
            kz: a.point.kz.as_deref().map(parse_angle).transpose()?.unwrap_or(0.0),
        };
        doc.insert("geometry".into(), json!({ "nx": geom.nx, "ny": geom.ny, "kz": num(geom.kz) }));
        decay_json(&decay_rate_fit(spec, &geom, corner, axis)?)
    } else {
        let ell = a.ell.ok_or_else(|| CliError::Usage("--ell is required for this probe".into()))?;
        let k = resolve_k(&model, &a.point, true)?;
        let energy = parse_energy(&a.energy)?;
        let h = model.bloch(&k)?;
        doc.insert("k".into(), nums(&k));
        doc.insert("energy".into(), complex(energy));
        doc.insert("ell".into(), json!(ell));
        let fit = match a.kind {
            ProbeKind::Lineshape => lineshape_exponent(&h, energy, ell, (1e-3, 1e-2), 20, &policy)?,
            _ => splitting_exponent(&h, energy, ell, &SplittingConfig::default(), &policy)?,
        };
        fit_json(&fit)
    };
    doc.extend(body);
    doc.insert("timestamp".into(), timestamp());
    emit(a.out.as_deref(), &json::to_string(&Value::Object(doc)))
}

fn selftest(a: SelftestArgs) -> Result<(), CliError> {
    let policy = build_policy(&a.tol)?;
    let ids: Vec<u8> = if a.only.is_empty() {
        criterion_names().iter().map(|c| c.0).collect()
    } else {
        a.only
    };
    let mut failed = 0;
    for id in ids {
        let outcome = run_one(id, &policy).ok_or_else(|| CliError::Usage(format!("no criterion {id}")))?;
        println!("{}", outcome.line());
        failed += usize::from(!outcome.pass);
    }
    if failed > 0 {
        return Err(CliError::Failed(format!("{failed} criteria failed")));
    }
    Ok(())
}

/// Used by tests to check that `path` exists and parses as JSON.
pub fn read_json(path: &Path) -> Result<Value, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|e| CliError::Failed(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn paths() {
        let (axis, v) = parse_path("kz=-pi:pi:401", 3).unwrap();
        assert_eq!(axis, 2);
        assert_eq!(v.len(), 401);
        assert_eq!((v[0], v[400]), (-PI, PI));
        assert!((v[300] - PI / 2.0).abs() < 1e-15);
        for bad in ["kz=0:1:10", "kq=0:1:10", "kx=0:1", "kx=0:1:1", "kx"] {
            assert!(parse_path(bad, 2).is_err(), "{bad}");
        }
    }
}
