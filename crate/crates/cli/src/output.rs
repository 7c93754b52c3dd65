//! CSV and JSON renderings of scans, trajectories, point analyses and
//! fraction estimates.
//!
//! Floats are written with Rust's shortest round-trip formatting, so the
//! same values always produce the same bytes.

use std::io::Write;

use kg_bohm_core::hdn::{HdnPoint, Verdict};
use kg_bohm_core::measure::{FractionEstimate, Sampling, ScanCell};
use kg_bohm_core::{FourVector, Tolerances, TrajectoryResult};
use serde_json::{json, Map, Value};

use crate::Error;

pub const SCAN_HEADER: [&str; 8] = [
    "x0",
    "x1",
    "x2",
    "x3",
    "selection",
    "theta",
    "w_plus_sq",
    "w_minus_sq",
];

pub const TRAJECTORY_HEADER: [&str; 10] = [
    "tau",
    "x0",
    "x1",
    "x2",
    "x3",
    "u0",
    "u1",
    "u2",
    "u3",
    "selection",
];

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn write_scan_csv<W: Write>(out: W, cells: &[ScanCell]) -> Result<(), Error> {
    let mut wtr = csv::Writer::from_writer(out);
    wtr.write_record(SCAN_HEADER)?;
    for cell in cells {
        let [a, b, c, d] = cell.x.components();
        wtr.write_record([
            a.to_string(),
            b.to_string(),
            c.to_string(),
            d.to_string(),
            cell.verdict.as_str().to_string(),
            opt(cell.theta),
            opt(cell.w_plus_sq),
            opt(cell.w_minus_sq),
        ])?;
    }
    wtr.flush()
        .map_err(|e| Error::Io("scan output".into(), e))?;
    Ok(())
}

/// One row per point, then a `# termination: <cause>` line.
pub fn write_trajectory_csv<W: Write>(out: W, result: &TrajectoryResult) -> Result<(), Error> {
    let mut wtr = csv::Writer::from_writer(out);
    wtr.write_record(TRAJECTORY_HEADER)?;
    for pt in &result.points {
        let mut row = Vec::with_capacity(10);
        row.push(pt.tau.to_string());
        row.extend(pt.x.components().iter().map(f64::to_string));
        row.extend(pt.tangent.u.components().iter().map(f64::to_string));
        row.push(pt.tangent.selection.as_str().to_string());
        wtr.write_record(&row)?;
    }
    wtr.flush()
        .map_err(|e| Error::Io("trajectory output".into(), e))?;
    let mut inner = wtr
        .into_inner()
        .map_err(|e| Error::Io("trajectory output".into(), e.into_error()))?;
    writeln!(inner, "# termination: {}", result.termination.as_str())
        .map_err(|e| Error::Io("trajectory output".into(), e))?;
    Ok(())
}

pub fn vec_json(v: &FourVector) -> Value {
    json!(v.components())
}

pub fn tolerances_json(t: &Tolerances) -> Value {
    json!({
        "class_tol": t.class_tol,
        "ortho_tol": t.ortho_tol,
        "node_tol": t.node_tol,
    })
}

/// JSON report of a point analysis.
pub fn point_json(pt: &HdnPoint) -> Value {
    let pair = &pt.pair;
    json!({
        "x": vec_json(&pt.x),
        "psi": [pt.polar.psi.re, pt.polar.psi.im],
        "p": vec_json(&pt.polar.p),
        "s": vec_json(&pt.polar.s),
        "theta": pair.theta,
        "w_plus": vec_json(&pair.w_plus),
        "w_minus": vec_json(&pair.w_minus),
        "w_plus_sq": pair.w_plus_sq(),
        "w_minus_sq": pair.w_minus_sq(),
        "class_plus": pair.class_plus.as_str(),
        "class_minus": pair.class_minus.as_str(),
        "selection": pair.selection.as_str(),
        "plane": pair.plane.as_str(),
        "consistent": pair.consistent,
    })
}

/// Report for a point where θ could not be formed because P·S vanishes.
pub fn orthogonal_point_json(
    x: &FourVector,
    psi: kg_bohm_core::Complex64,
    p: &FourVector,
    s: &FourVector,
    ratio: f64,
    tols: &Tolerances,
) -> Value {
    json!({
        "x": vec_json(x),
        "psi": [psi.re, psi.im],
        "p": vec_json(p),
        "s": vec_json(s),
        "theta": null,
        "w_plus": null,
        "w_minus": null,
        "w_plus_sq": null,
        "w_minus_sq": null,
        "class_plus": null,
        "class_minus": null,
        "selection": "OrthogonalDegenerate",
        "plane": kg_bohm_core::plane_class(p, s, tols.class_tol).as_str(),
        "orthogonality_ratio": ratio,
        "consistent": true,
    })
}

pub fn estimate_json(est: &FractionEstimate, tols: &Tolerances) -> Value {
    let mut counts = Map::new();
    let mut fractions = Map::new();
    let mut wilson = Map::new();
    for v in Verdict::ALL {
        let key = v.as_str().to_string();
        counts.insert(key.clone(), json!(est.tally.count(v)));
        fractions.insert(key.clone(), json!(est.fraction(v)));
        let (lo, hi) = est.wilson_95(v);
        wilson.insert(key, json!([lo, hi]));
    }
    let mut obj = Map::new();
    obj.insert("n".into(), json!(est.total()));
    obj.insert("seed".into(), json!(est.seed));
    match est.sampling {
        Sampling::SpaceTime(region) => {
            obj.insert("sampling".into(), json!("uniform-spacetime-box"));
            obj.insert(
                "region".into(),
                json!({ "lo": vec_json(&region.lo()), "hi": vec_json(&region.hi()) }),
            );
        }
        Sampling::PairSpace { sigma } => {
            obj.insert("sampling".into(), json!("isotropic-normal-pair-space"));
            obj.insert("sigma".into(), json!(sigma));
        }
    }
    obj.insert("counts".into(), Value::Object(counts));
    obj.insert("fractions".into(), Value::Object(fractions));
    obj.insert("wilson_95".into(), Value::Object(wilson));
    obj.insert("tolerances".into(), tolerances_json(tols));
    Value::Object(obj)
}
